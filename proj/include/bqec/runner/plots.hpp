#pragma once

#include "bqec/runner/sweep.hpp"

namespace bqec::runner {

/// Writes per-panel CSV files for a figure recipe (fig5, fig6, fig9, fig10)
/// into out_dir.  Raises ConfigError when the result table is missing grid
/// points required by the recipe, listing them.
std::vector<std::string> emit_plot_data(const std::string& recipe,
                                        const std::vector<ResultRow>& rows,
                                        const std::string& out_dir);

}  // namespace bqec::runner
