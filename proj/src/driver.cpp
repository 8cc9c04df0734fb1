#include "hbem/driver.hpp"

#include <Eigen/Core>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "hbem/io.hpp"
#include "hbem/parallel.hpp"
#include "hbem/reference.hpp"

namespace hbem {

namespace {

template <class F>
auto staged(const char* stage, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(stage) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(stage) + ": " + e.what());
    }
}

template <class W>
void write_file(const std::filesystem::path& path, W&& writer) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open " + path.string());
    writer(f);
    f.flush();
    if (!f) throw std::runtime_error("io: failed writing " + path.string());
}

nlohmann::ordered_json manifest(const ProblemConfig& cfg, const RunOptions& opt, unsigned threads,
                                const std::vector<LevelReport>& reports, std::size_t m_ref_used) {
    nlohmann::ordered_json j;
    j["program"] = "hbem";
    j["version"] = version;
    j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
#if defined(__clang__)
    j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    j["compiler"] = std::string("gcc ") + __VERSION__;
#else
    j["compiler"] = "unknown";
#endif
    // Parameter values in their canonical text form.
    std::map<std::string, std::string> values;
    std::istringstream text(serialize_config(cfg));
    for (std::string line; std::getline(text, line);) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) values[line.substr(0, eq)] = line.substr(eq + 3);
    }
    auto& params = j["parameters"];
    params = nlohmann::ordered_json::object();
    for (const auto& key : config_keys()) {
        params[key] = {{"value", values[key]}, {"defaulted", cfg.is_defaulted(key)}};
    }
    auto& ov = j["overrides"];
    ov = nlohmann::ordered_json::object();
    if (opt.levels) ov["adapt.levels"] = *opt.levels;
    if (opt.out) ov["output.dir"] = opt.out->string();
    j["run"] = {{"serial", opt.serial}, {"threads", threads}, {"reference_m_ref", m_ref_used}};
    auto& lv = j["levels"];
    lv = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        // The fine mesh carries 2M nodes and 2M elements: one P1 and one P0 block.
        lv.push_back({{"level", r.level}, {"M", r.M}, {"fine_nodes", 2 * r.M}, {"system_dimension", 4 * r.M}});
    }
    return j;
}

}  // namespace

RunSummary run_problem(ProblemConfig cfg, const RunOptions& opt, std::ostream& log) {
    if (opt.levels) cfg.levels = *opt.levels;
    if (opt.out) cfg.output_dir = opt.out->string();
    staged("config", [&] {
        cfg.validate();
        return 0;
    });
    const unsigned threads = opt.serial ? 1u : resolve_threads(0);
    RunSummary summary;
    summary.out_dir = cfg.output_dir;
    std::filesystem::create_directories(summary.out_dir);
    const auto path = [&](const char* name) { return summary.out_dir / name; };

    std::optional<ReferenceSolution> ref;
    if (opt.reference && cfg.m_ref > 0) {
        log << "reference: uniform solve on " << cfg.m_ref << " elements\n" << std::flush;
        ref = staged("reference", [&] { return reference_solve(cfg, cfg.m_ref, threads); });
        write_file(path("reference_trace.csv"), [&](std::ostream& os) { write_trace_csv(os, ref->solution); });
    }

    std::vector<LevelReport> done;
    const auto hook = [&](const SolutionPair& fine, LevelReport& rep) {
        if (ref) {
            const RelativeErrors e = staged("reference", [&] { return relative_errors(fine, *ref); });
            rep.e1_hat = e.e1;
            rep.e2_hat = e.e2;
        }
        log << "level " << rep.level << ": M=" << rep.M << " eta=" << io::num(rep.eta_tilde)
            << " marked=" << rep.marked;
        if (rep.e1_hat) log << " e1=" << io::num(*rep.e1_hat) << " e2=" << io::num(*rep.e2_hat);
        log << '\n' << std::flush;
        done.push_back(rep);
        write_file(path("levels.csv"), [&](std::ostream& os) { write_levels_csv(os, done); });
    };
    const AdaptiveResult result = staged("adapt", [&] { return adaptive_solve(cfg, threads, hook); });
    summary.reports = result.reports;

    write_file(path("trace_final.csv"), [&](std::ostream& os) { write_trace_csv(os, result.solution); });
    write_file(path("mesh_final.csv"), [&](std::ostream& os) { write_mesh_csv(os, *result.coarse); });

    if (opt.field && cfg.field.nx > 0 && cfg.field.ny > 0) {
        log << "field: " << cfg.field.nx << " x " << cfg.field.ny << " grid\n" << std::flush;
        const auto samples = staged("field", [&] {
            return compute_field(result.solution, cfg.source, cfg.interior_context(), cfg.exterior_context(),
                                 cfg.field, threads);
        });
        write_file(path("field_real.csv"), [&](std::ostream& os) { write_field_csv(os, samples, false); });
        write_file(path("field_imag.csv"), [&](std::ostream& os) { write_field_csv(os, samples, true); });
    }

    write_file(path("run_manifest.json"), [&](std::ostream& os) {
        os << manifest(cfg, opt, threads, result.reports, ref ? ref->m_ref : 0).dump(2) << '\n';
    });
    return summary;
}

int run_config_file(const std::filesystem::path& file, const RunOptions& opt, std::ostream& log, std::ostream& err) {
    try {
        const ProblemConfig cfg = staged("config", [&] { return load_config(file); });
        run_problem(cfg, opt, log);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hbem
