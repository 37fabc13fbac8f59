// Copyright 2026 The gaussmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Builds the double-homodyne measurement from a beam splitter and a vacuum
// ancilla, and checks that it is the Q-function observable.

#include <iostream>
#include <numbers>

#include "gaussmeas/gaussmeas.hpp"

using namespace gaussmeas;

int main() {
  const double pi = std::numbers::pi;
  // Second arm rotated by -pi/2: homodyning p on it reads the conjugate quadrature.
  const Matrix s = symplectic_beam_splitter(2, 0, 1, pi / 4) * symplectic_rotation(2, 1, -pi / 2);
  const DilationSpec spec(s, Vector::Zero(4), GaussianState::vacuum(1), 2);
  const GaussianChannel ch = channel_from_dilation(spec);
  const GaussianObservable homodyne = observable_from_channel(ch);
  const GaussianObservable qf = linear_postprocess(homodyne, std::sqrt(2.0) * Matrix::Identity(2, 2));

  std::cout << "A0 =\n" << qf.a0() << "\nB0 =\n" << qf.b0() << "\n";
  const Classification c = classify(qf);
  std::cout << "covariant " << c.covariant << ", informationally complete " << c.informationally_complete
            << ", symplectic eigenvalue of B0 " << symplectic_eigenvalues(qf.b0())[0] << "\n";

  Vector m(2);
  m << 1.0, -0.5;
  const GaussianDistribution d = pushforward(qf, GaussianState::coherent(m));
  std::cout << "outcome mean on a coherent state " << d.mean.transpose() << "\n";
  return 0;
}
