// mcfd/hungarian.h
//
// Copyright 2025  The mcfd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MCFD_HUNGARIAN_H_
#define MCFD_HUNGARIAN_H_

#include <Eigen/Core>
#include <vector>

namespace mcfd {

// Minimum-cost one-to-one assignment of rows to columns (rectangular
// allowed). Result[r] is the column assigned to row r, or -1 when there are
// more rows than columns and row r stays unmatched. O(n^2 m) potentials
// method; exact for finite costs.
std::vector<int> HungarianMin(const Eigen::MatrixXd& cost);

// Maximum-gain variant: HungarianMin on (max(gain) - gain). Rows beyond the
// column count stay unmatched (-1).
std::vector<int> HungarianMax(const Eigen::MatrixXd& gain);

}  // namespace mcfd

#endif  // MCFD_HUNGARIAN_H_
