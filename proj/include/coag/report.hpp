#pragma once

#include "coag/config.hpp"
#include "coag/diagnostics.hpp"
#include "coag/laplace.hpp"
#include "coag/solver.hpp"

#include <string>
#include <vector>

// vendored single-header nlohmann/json
#include <json.hpp>

namespace coag::report {

nlohmann::json to_json(const config::RunConfig& cfg);
nlohmann::json to_json(const solver::SolverReport& rep);
nlohmann::json to_json(const laplace::NormResult& nr);
nlohmann::json to_json(const diagnostics::CheckRecord& rec);
nlohmann::json to_json(const std::vector<diagnostics::CheckRecord>& recs);

/// Atomic file write (temp + rename).
void write_text(const std::string& path, const std::string& content);

void write_check_csv(const std::string& path,
                     const std::vector<diagnostics::CheckRecord>& recs);

} // namespace coag::report
