#include "coag/report.hpp"

#include <cstdio>
#include <fstream>

namespace coag::report {

using nlohmann::json;

json to_json(const config::RunConfig& cfg) {
    return json{{"kernel", {{"family", cfg.kernel_family},
                            {"alpha", cfg.alpha},
                            {"epsilon", cfg.epsilon}}},
                {"grid", {{"x_min", cfg.grid_min}, {"x_max", cfg.grid_max}, {"n", cfg.grid_n}}},
                {"solver", {{"max_iter", cfg.max_iter},
                            {"tol", cfg.tol},
                            {"damping", cfg.damping},
                            {"normalization", cfg.normalization}}},
                {"theta", cfg.theta},
                {"output_dir", cfg.output_dir},
                {"seed", cfg.seed}};
}

json to_json(const solver::SolverReport& rep) {
    return json{{"iterations", rep.iterations},
                {"residual_history", rep.residual_history},
                {"contraction_history", rep.contraction_history},
                {"final_norm_m", rep.final_norm_m},
                {"kappa", rep.kappa},
                {"converged", rep.converged},
                {"wall_time_s", rep.wall_time_s},
                {"clip_count", rep.clip_count},
                {"amp_factor_final", rep.amp_factor_final},
                {"tail_fit_window", rep.tail_fit_window}};
}

json to_json(const laplace::NormResult& nr) {
    return json{{"k", nr.k},
                {"chi", nr.chi},
                {"value", nr.value},
                {"argmax_p", nr.argmax_p},
                {"boundary_flag", nr.boundary}};
}

json to_json(const diagnostics::CheckRecord& rec) {
    const char* status = rec.status == diagnostics::CheckRecord::Status::pass ? "pass"
                         : rec.status == diagnostics::CheckRecord::Status::fail ? "fail"
                                                                                : "inconclusive";
    return json{{"name", rec.name},
                {"anchor", rec.anchor},
                {"status", status},
                {"measured", rec.measured},
                {"threshold", rec.threshold},
                {"hard", rec.hard}};
}

json to_json(const std::vector<diagnostics::CheckRecord>& recs) {
    json arr = json::array();
    for (auto& r : recs) arr.push_back(to_json(r));
    return arr;
}

void write_text(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

void write_check_csv(const std::string& path,
                     const std::vector<diagnostics::CheckRecord>& recs) {
    std::string body = "name,anchor,status,measured,threshold,hard\n";
    char buf[256];
    for (auto& r : recs) {
        const char* status = r.status == diagnostics::CheckRecord::Status::pass ? "pass"
                             : r.status == diagnostics::CheckRecord::Status::fail ? "fail"
                                                                                  : "inconclusive";
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%d\n", r.name.c_str(),
                      r.anchor.c_str(), status, r.measured, r.threshold, r.hard ? 1 : 0);
        body += buf;
    }
    write_text(path, body);
}

} // namespace coag::report
