#include "ramanmem/cli.hpp"

#include "ramanmem/config.hpp"
#include "ramanmem/csv.hpp"
#include "ramanmem/errors.hpp"
#include "ramanmem/modematch.hpp"
#include "ramanmem/modes.hpp"
#include "ramanmem/propagator.hpp"
#include "ramanmem/readout.hpp"
#include "ramanmem/transverse.hpp"
#include "ramanmem/verify.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace ramanmem::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outputs {
    fs::path dir;
    json doc = json::object();

    void write(const std::string& name, const CsvTable& table) {
        write_file_atomic(dir / name, table.str());
        json rows = json::array();
        for (const auto& r : table.rows()) {
            rows.push_back(r);
        }
        doc["files"][name] = {{"header", table.header()}, {"rows", std::move(rows)}};
    }
};

std::vector<double> parse_list(const std::string& text, const char* field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw DomainError(std::string(field) + ": cannot parse '" + item + "' as a number");
        }
    }
    if (out.empty()) {
        throw DomainError(std::string(field) + ": empty list");
    }
    return out;
}

// Inclusive range with a step; the last point snaps to `hi` within 1e-9.
std::vector<double> stepped_range(double lo, double hi, double step) {
    std::vector<double> out;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) {
        out.push_back(lo + step * i);
    }
    return out;
}

std::string nan_or(bool ok, double v) {
    return ok ? format_number(v) : std::string("nan");
}

int cmd_modes(const RunConfig& cfg, Outputs& out) {
    const auto& m = cfg.modes;
    std::vector<double> cs;
    for (int i = 0; i < m.c_steps; ++i) {
        cs.push_back(m.c_min + (m.c_max - m.c_min) * i / (m.c_steps - 1));
    }
    const auto rows = singular_value_curve(cs, m.n_modes, cfg.grid_n);
    CsvTable sv({"C", "i", "lambda", "mu"});
    bool all_ok = true;
    for (const auto& r : rows) {
        all_ok = all_ok && r.ok;
        sv.add_row({format_number(r.c), std::to_string(r.index), nan_or(r.ok, r.lambda),
                    nan_or(r.ok, r.mu)});
    }
    out.write("singular_values.csv", sv);

    for (double c : parse_list(m.mode_couplings, "modes.mode_couplings")) {
        const ModeDecomposition d = solve_modes(make_grid(cfg.grid_n, c), m.n_modes);
        std::vector<std::string> header{"x"};
        for (int i = 0; i < d.count(); ++i) {
            header.push_back("phi_" + std::to_string(i + 1));
        }
        CsvTable t(header);
        for (int k = 0; k < d.grid.size(); ++k) {
            std::vector<double> row{d.grid.node(k)};
            for (int i = 0; i < d.count(); ++i) {
                row.push_back(d.modes(k, i));
            }
            t.add_numeric_row(row);
        }
        out.write("modes_C" + format_number(c) + ".csv", t);
    }
    if (!all_ok) {
        for (const auto& r : rows) {
            if (!r.ok) {
                std::cerr << "mode solve failed at C=" << format_number(r.c) << ": " << r.error
                          << '\n';
                break;
            }
        }
        return kNumericFailure;
    }
    return kSuccess;
}

int cmd_readin(const RunConfig& cfg, Outputs& out) {
    const auto& r = cfg.readin;
    const Wavepacket photon = gaussian_wavepacket(r.n_tau, r.duration, r.tau0, r.sigma);
    const ModeDecomposition modes = solve_modes(make_grid(cfg.grid_n, cfg.c), 1);
    ShapeOptions opt;
    opt.min_overlap = r.min_overlap;
    opt.intensity_cap = r.intensity_cap;
    const ShapedControl shaped = shape_control(photon, modes, opt);
    const ReadinResult res = simulate_readin(photon, shaped.control, r.n_tau, r.n_z);

    CsvTable ctl({"tau", "intensity"});
    for (int k = 0; k < shaped.control.size(); ++k) {
        ctl.add_numeric_row({shaped.control.node(k), std::norm(shaped.control.samples()[k])});
    }
    out.write("control_shape.csv", ctl);

    const PropagationMesh mesh{r.n_tau, r.n_z, r.duration};
    CsvTable map({"tau", "z", "intensity"});
    for (int k = 0; k < r.n_tau; ++k) {
        for (int m = 0; m < r.n_z; ++m) {
            map.add_numeric_row({mesh.tau_center(k), mesh.z_center(m), res.intensity_map(k, m)});
        }
    }
    out.write("readin_intensity.csv", map);

    out.doc["summary"] = {{"efficiency", res.efficiency},
                          {"transmitted", res.transmitted},
                          {"mode_overlap", shaped.overlap},
                          {"capped_cells", shaped.capped_cells},
                          {"used_fallback", shaped.used_fallback}};
    std::cout << "efficiency " << format_number(res.efficiency) << "\ntransmitted "
              << format_number(res.transmitted) << "\nmode_overlap "
              << format_number(shaped.overlap) << '\n';
    return kSuccess;
}

int cmd_retrieval_map(const RunConfig& cfg, Outputs& out,
                      const std::vector<std::string>& overlap_points) {
    const auto& q = cfg.retrieval;
    const auto cs = stepped_range(q.c_min, q.c_max, q.c_step);
    const auto crs = stepped_range(q.cr_min, q.cr_max, q.cr_step);
    const auto points = retrieval_map(cs, crs, q.n_modes, q.grid_n);
    CsvTable t({"C", "Cr", "N"});
    bool all_ok = true;
    for (const auto& p : points) {
        all_ok = all_ok && p.ok;
        t.add_row({format_number(p.c), format_number(p.c_r), nan_or(p.ok, p.n)});
    }
    out.write("retrieval_map.csv", t);

    ModeCache cache(q.grid_n, q.n_modes);
    for (const auto& point : overlap_points) {
        const auto pair = parse_list(point, "--overlaps");
        if (pair.size() != 2) {
            throw DomainError("--overlaps expects C,Cr");
        }
        const RetrievalPoint p = retrieval_point(pair[0], pair[1], q.n_modes, cache);
        CsvTable o({"i", "f_i", "lambda_r_i"});
        for (std::size_t i = 0; i < p.overlaps.size(); ++i) {
            o.add_row({std::to_string(i + 1), format_number(p.overlaps[i]),
                       format_number(p.lambda_r[i])});
        }
        out.write("overlaps_C" + format_number(p.c) + "_Cr" + format_number(p.c_r) + ".csv", o);
    }
    if (!all_ok) {
        return kNumericFailure;
    }
    return kSuccess;
}

int cmd_transverse(const RunConfig& cfg, Outputs& out) {
    const auto& t = cfg.transverse;
    const KernelNormalization norm = t.normalization == "unit-hilbert-schmidt"
                                         ? KernelNormalization::UnitHilbertSchmidt
                                         : KernelNormalization::FluxPreserving;
    const TransverseDecomposition d = paraxial_modes(cfg.c, t.n_radial, t.n_modes, norm);
    const WaistFit fit = gaussian_waist_fit(d);

    CsvTable s({"j", "sigma"});
    for (std::size_t j = 0; j < d.sigmas.size(); ++j) {
        s.add_row({std::to_string(j + 1), format_number(d.sigmas[j])});
    }
    out.write("transverse_sigmas.csv", s);

    std::vector<std::string> header{"rho"};
    for (int j = 0; j < d.radial_modes.cols(); ++j) {
        header.push_back("re_phi_" + std::to_string(j + 1));
        header.push_back("im_phi_" + std::to_string(j + 1));
    }
    CsvTable m(header);
    for (int k = 0; k < d.rho.size(); ++k) {
        std::vector<double> row{d.rho(k)};
        for (int j = 0; j < d.radial_modes.cols(); ++j) {
            row.push_back(d.radial_modes(k, j).real());
            row.push_back(d.radial_modes(k, j).imag());
        }
        m.add_numeric_row(row);
    }
    out.write("transverse_modes.csv", m);

    out.doc["summary"] = {{"normalization", to_string(norm)},
                          {"normalization_constant", d.normalization_constant},
                          {"sigma_1", d.sigmas[0]},
                          {"waist", fit.waist},
                          {"control_waist", fit.control_waist},
                          {"fit_rms_residual", fit.rms_residual}};
    std::cout << "normalization " << to_string(norm) << "\nsigma_1 "
              << format_number(d.sigmas[0]) << "\nwaist " << format_number(fit.waist)
              << "\ncontrol_waist " << format_number(fit.control_waist) << '\n';
    return kSuccess;
}

int cmd_verify(const RunConfig& cfg, Outputs& out) {
    const VerifyReport report = run_verify(cfg);
    json doc = report.to_json();
    doc["config"] = to_json(cfg);
    write_file_atomic(out.dir / "verify_report.json", doc.dump(2) + "\n");
    out.doc["report"] = report.to_json();
    for (const auto& c : report.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ' ' << format_number(c.value)
                  << (c.at_least ? " >= " : " <= ") << format_number(c.threshold);
        if (!c.error.empty()) {
            std::cout << " (" << c.error << ')';
        }
        std::cout << '\n';
    }
    return report.passed() ? kSuccess : kThresholdFailure;
}

void report_error(const std::string& kind, const std::string& message, int code) {
    const json err{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
    std::cerr << err.dump() << '\n';
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Raman quantum memory simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    bool json_flag = false;
    std::vector<std::string> overrides;
    std::optional<int> grid_n;
    std::optional<double> coupling;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides config and environment)");
    app.add_flag("--json", json_flag, "also print all outputs as one JSON document");
    app.add_option("--set", overrides, "override a config field, e.g. readin.n_tau=200");
    app.add_option("--grid-n", grid_n, "quadrature points");
    app.add_option("-C,--coupling", coupling, "coupling parameter C");

    auto* modes = app.add_subcommand("modes", "singular values and mode functions");
    auto* readin = app.add_subcommand("readin", "shaped control and read-in intensity map");
    auto* rmap = app.add_subcommand("retrieval-map", "retrieval probability over (C, Cr)");
    std::vector<std::string> overlap_points;
    rmap->add_option("--overlaps", overlap_points, "also write overlaps for C,Cr");
    auto* trans = app.add_subcommand("transverse", "paraxial modes and Gaussian waist");
    auto* verify = app.add_subcommand("verify", "residual checks with a JSON report");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what(), kValidationError);
        return kValidationError;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            const json doc = json::parse(in, nullptr, false);
            if (doc.is_discarded()) {
                throw DomainError("config: " + config_path + " is not valid JSON");
            }
            cfg = apply_json(cfg, doc);
        }
        if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
            cfg.output_dir = env;
        }
        for (const auto& o : overrides) {
            cfg = apply_json(cfg, override_patch(o));
        }
        if (grid_n) {
            cfg.grid_n = *grid_n;
        }
        if (coupling) {
            cfg.c = *coupling;
        }
        if (!out_dir.empty()) {
            cfg.output_dir = out_dir;
        }
        if (json_flag) {
            cfg.json = true;
        }
        validate(cfg);
    } catch (const DomainError& e) {
        report_error("validation", e.what(), kValidationError);
        return kValidationError;
    } catch (const nlohmann::json::exception& e) {
        report_error("validation", e.what(), kValidationError);
        return kValidationError;
    }

    Outputs out{cfg.output_dir};
    int code = kSuccess;
    std::string command;
    try {
        fs::create_directories(out.dir);
        if (modes->parsed()) {
            command = "modes";
            code = cmd_modes(cfg, out);
        } else if (readin->parsed()) {
            command = "readin";
            code = cmd_readin(cfg, out);
        } else if (rmap->parsed()) {
            command = "retrieval-map";
            code = cmd_retrieval_map(cfg, out, overlap_points);
        } else if (trans->parsed()) {
            command = "transverse";
            code = cmd_transverse(cfg, out);
        } else if (verify->parsed()) {
            command = "verify";
            code = cmd_verify(cfg, out);
        }
    } catch (const DomainError& e) {
        report_error("validation", e.what(), kValidationError);
        return kValidationError;
    } catch (const UnreachableShapeError& e) {
        report_error("unreachable_shape", e.what(), kNumericFailure);
        return kNumericFailure;
    } catch (const NumericError& e) {
        report_error("numeric", e.what(), kNumericFailure);
        return kNumericFailure;
    } catch (const std::exception& e) {
        report_error("runtime", e.what(), kNumericFailure);
        return kNumericFailure;
    }

    if (cfg.json) {
        out.doc["command"] = command;
        out.doc["exit_code"] = code;
        std::cout << out.doc.dump() << '\n';
    }
    return code;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args);
}

} // namespace ramanmem::cli
