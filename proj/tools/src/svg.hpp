// Copyright 2026 The gqcr Authors
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

#pragma once

// Minimal static SVG line plots for sweep output.

#include <string>
#include <vector>

namespace gqcr::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = true;
    bool log_y = true;
};

std::string render_svg(const PlotSpec &spec, const std::vector<Series> &series);

/// Least-squares slope of log(y) against log(x); non-finite points skipped.
double log_log_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace gqcr::cli
