// Copyright 2026 The fastgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FASTGATE_PROPAGATOR_HPP
#define FASTGATE_PROPAGATOR_HPP

#include <array>

#include "fastgate/fock.hpp"
#include "fastgate/pulses.hpp"

namespace fastgate {

/// 2x2 operator on one ion in the {e, g} basis.
struct Mat2 {
    Complex ee{1.0}, eg{0.0}, ge{0.0}, gg{1.0};

    Mat2 operator*(const Mat2 &o) const {
        return {ee * o.ee + eg * o.ge, ee * o.eg + eg * o.gg, ge * o.ee + gg * o.ge, ge * o.eg + gg * o.gg};
    }
};

/// Per-ion pulse blocks at a fixed c-number kx (motion frozen during pulses).
Mat2 ideal_kick_block(int z, double kx);
Mat2 pulse_block_xi(int direction, double xi, double kx, double phi);
Mat2 pulse_block_nonrwa(int direction, double t_start, double kx, const NonRwaPulses &model);
/// All 2|z| pulses of one kick event, composed in time order.
Mat2 kick_event_block(int z, double t_start, double kx, const ErrorModel &model);

/// State-vector propagator for one SectorSpace.
///
/// Kick events act diagonally on the spectrum of X = a + a^dag, where the
/// internal dynamics reduce to a 4x4 block per quadrature eigenvalue and that
/// block factorizes into one 2x2 block per ion. Free evolution is diagonal in
/// the number basis. States are stored in the number basis between calls.
class SectorPropagator {
  public:
    explicit SectorPropagator(SectorSpace space);

    void free_evolve(ComplexVector &state, double dt) const;
    void kick_event(ComplexVector &state, int z, double t_start, const ErrorModel &model) const;

    const SectorSpace &space() const { return space_; }

  private:
    SectorSpace space_;
};

} // namespace fastgate

#endif
