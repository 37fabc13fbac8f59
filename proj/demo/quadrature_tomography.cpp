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


// Finitely many quadratures: never informationally complete, yet three of
// them pin down a Gaussian state. Two of them leave a witness pair.

#include <iostream>
#include <numbers>

#include "gaussmeas/gaussmeas.hpp"

using namespace gaussmeas;

int main() {
  const double pi = std::numbers::pi;
  Vector m(2);
  m << 0.3, 0.8;
  Matrix v(2, 2);
  v << 1.8, 0.4, 0.4, 1.1;
  const GaussianState truth(m, v);

  std::vector<Observation> data;
  ObservableSet set;
  for (double theta : {0.0, pi / 3, 2 * pi / 3}) {
    const GaussianObservable q = rotated_quadrature(theta);
    set.add(q);
    const Matrix draws = sample_outcomes(pushforward(q, truth), 200000, 7);
    data.push_back({q, empirical_distribution(draws)});
  }
  const Reconstruction rec = reconstruct_gaussian(data);
  std::cout << "IC: " << ic_finite_set(set) << "\nrank " << rec.rank << " of " << rec.unknowns
            << "\nestimated m " << rec.m.transpose() << "\nestimated V\n" << rec.v << "\n";

  ObservableSet two;
  two.add(rotated_quadrature(0.0));
  two.add(rotated_quadrature(pi / 2));
  if (const auto w = gaussian_witness(two)) {
    std::cout << "witness for {Q0, Qpi/2}:\n" << w->state_a.v() << "\nvs\n" << w->state_b.v() << "\n";
  }
  return 0;
}
