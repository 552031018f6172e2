/*
 * Copyright 2026 The SLATE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slate::cli {

// Runs one `slate` subcommand. Returns 0 on success, 2 on usage or
// validation errors and 1 on runtime errors; data goes to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Line chart as SVG 1.1, one polyline per series plus a legend.
std::string render_svg(const std::vector<Series>& series,
                       const std::string& x_label, const std::string& y_label);

}  // namespace slate::cli
