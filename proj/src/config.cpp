#include "ramanmem/config.hpp"

#include "ramanmem/errors.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace ramanmem {

using nlohmann::json;

namespace {

// Recursively merges `patch` into `target`, which already holds every
// valid key with a value of the right type.
void merge_checked(json& target, const json& patch, const std::string& path) {
    if (!patch.is_object()) {
        throw DomainError("config: " + (path.empty() ? std::string("document") : path) +
                          " must be an object");
    }
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!target.contains(it.key())) {
            throw DomainError("config: unknown field '" + key + "'");
        }
        json& slot = target[it.key()];
        const json& value = it.value();
        if (slot.is_object()) {
            merge_checked(slot, value, key);
        } else if (slot.is_boolean()) {
            if (!value.is_boolean()) {
                throw DomainError("config: field '" + key + "' must be a boolean");
            }
            slot = value;
        } else if (slot.is_string()) {
            if (!value.is_string()) {
                throw DomainError("config: field '" + key + "' must be a string");
            }
            slot = value;
        } else if (slot.is_number_integer()) {
            if (value.is_number_integer()) {
                slot = value;
            } else if (value.is_number_float() &&
                       value.get<double>() == std::floor(value.get<double>())) {
                slot = static_cast<long long>(value.get<double>());
            } else {
                throw DomainError("config: field '" + key + "' must be an integer");
            }
        } else if (slot.is_number()) {
            if (!value.is_number()) {
                throw DomainError("config: field '" + key + "' must be a number");
            }
            slot = value.get<double>();
        }
    }
}

} // namespace

json to_json(const RunConfig& c) {
    const auto& m = c.modes;
    const auto& r = c.readin;
    const auto& q = c.retrieval;
    const auto& t = c.transverse;
    const auto& v = c.verify;
    const auto& h = c.thresholds;
    return json{
        {"output_dir", c.output_dir},
        {"json", c.json},
        {"grid_n", c.grid_n},
        {"c", c.c},
        {"modes",
         {{"c_min", m.c_min},
          {"c_max", m.c_max},
          {"c_steps", m.c_steps},
          {"n_modes", m.n_modes},
          {"mode_couplings", m.mode_couplings}}},
        {"readin",
         {{"sigma", r.sigma},
          {"tau0", r.tau0},
          {"duration", r.duration},
          {"n_tau", r.n_tau},
          {"n_z", r.n_z},
          {"min_overlap", r.min_overlap},
          {"intensity_cap", r.intensity_cap}}},
        {"retrieval",
         {{"c_min", q.c_min},
          {"c_max", q.c_max},
          {"c_step", q.c_step},
          {"cr_min", q.cr_min},
          {"cr_max", q.cr_max},
          {"cr_step", q.cr_step},
          {"n_modes", q.n_modes},
          {"grid_n", q.grid_n}}},
        {"transverse",
         {{"n_radial", t.n_radial}, {"n_modes", t.n_modes}, {"normalization", t.normalization}}},
        {"verify",
         {{"n_prop", v.n_prop},
          {"n_stokes", v.n_stokes},
          {"stokes_c", v.stokes_c},
          {"flux_cases", v.flux_cases},
          {"seed", v.seed}}},
        {"thresholds",
         {{"circle", h.circle},
          {"orthonormality", h.orthonormality},
          {"symmetrization", h.symmetrization},
          {"reconstruction_g0", h.reconstruction_g0},
          {"reconstruction_g1", h.reconstruction_g1},
          {"unitarity", h.unitarity},
          {"equivalence", h.equivalence},
          {"flux", h.flux},
          {"symplectic", h.symplectic},
          {"parseval", h.parseval},
          {"transverse_orthonormality", h.transverse_orthonormality},
          {"readin_efficiency", h.readin_efficiency},
          {"readin_balance", h.readin_balance}}},
    };
}

RunConfig apply_json(const RunConfig& base, const json& doc) {
    json merged = to_json(base);
    merge_checked(merged, doc, "");

    RunConfig c;
    c.output_dir = merged["output_dir"];
    c.json = merged["json"];
    c.grid_n = merged["grid_n"];
    c.c = merged["c"];
    const json& m = merged["modes"];
    c.modes = {m["c_min"], m["c_max"], m["c_steps"], m["n_modes"], m["mode_couplings"]};
    const json& r = merged["readin"];
    c.readin = {r["sigma"], r["tau0"],        r["duration"],     r["n_tau"],
                r["n_z"],   r["min_overlap"], r["intensity_cap"]};
    const json& q = merged["retrieval"];
    c.retrieval = {q["c_min"],  q["c_max"],   q["c_step"],  q["cr_min"],
                   q["cr_max"], q["cr_step"], q["n_modes"], q["grid_n"]};
    const json& t = merged["transverse"];
    c.transverse = {t["n_radial"], t["n_modes"], t["normalization"]};
    const json& v = merged["verify"];
    c.verify = {v["n_prop"], v["n_stokes"], v["stokes_c"], v["flux_cases"],
                v["seed"].get<unsigned long long>()};
    const json& h = merged["thresholds"];
    c.thresholds = {h["circle"],
                    h["orthonormality"],
                    h["symmetrization"],
                    h["reconstruction_g0"],
                    h["reconstruction_g1"],
                    h["unitarity"],
                    h["equivalence"],
                    h["flux"],
                    h["symplectic"],
                    h["parseval"],
                    h["transverse_orthonormality"],
                    h["readin_efficiency"],
                    h["readin_balance"]};
    return c;
}

void validate(const RunConfig& c) {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const char* field, const std::string& why) {
        if (!ok) {
            problems.push_back(std::string(field) + ": " + why);
        }
    };
    require(!c.output_dir.empty(), "output_dir", "must not be empty");
    require(c.grid_n >= 10, "grid_n", "must be at least 10");
    require(c.c > 0.0, "c", "must be positive");

    require(c.modes.c_min > 0.0, "modes.c_min", "must be positive");
    require(c.modes.c_max > c.modes.c_min, "modes.c_max", "must exceed modes.c_min");
    require(c.modes.c_steps >= 2, "modes.c_steps", "must be at least 2");
    require(c.modes.n_modes >= 1 && c.modes.n_modes < c.grid_n, "modes.n_modes",
            "must lie in [1, grid_n)");

    require(c.readin.sigma > 0.0, "readin.sigma", "must be positive");
    require(c.readin.duration > 0.0, "readin.duration", "must be positive");
    require(c.readin.tau0 >= 0.0 && c.readin.tau0 <= c.readin.duration, "readin.tau0",
            "must lie in [0, duration]");
    require(c.readin.n_tau >= 10, "readin.n_tau", "must be at least 10");
    require(c.readin.n_z >= 10, "readin.n_z", "must be at least 10");
    require(c.readin.min_overlap > 0.0 && c.readin.min_overlap <= 1.0, "readin.min_overlap",
            "must lie in (0, 1]");
    require(c.readin.intensity_cap > 1.0, "readin.intensity_cap", "must exceed 1");

    const auto& q = c.retrieval;
    require(q.c_min > 0.0, "retrieval.c_min", "must be positive");
    require(q.c_max >= q.c_min, "retrieval.c_max", "must not be below retrieval.c_min");
    require(q.c_step > 0.0, "retrieval.c_step", "must be positive");
    require(q.cr_min > 0.0, "retrieval.cr_min", "must be positive");
    require(q.cr_max >= q.cr_min, "retrieval.cr_max", "must not be below retrieval.cr_min");
    require(q.cr_step > 0.0, "retrieval.cr_step", "must be positive");
    require(q.grid_n >= 10, "retrieval.grid_n", "must be at least 10");
    require(q.n_modes >= 1 && q.n_modes < q.grid_n, "retrieval.n_modes",
            "must lie in [1, retrieval.grid_n)");

    require(c.transverse.n_radial >= 10, "transverse.n_radial", "must be at least 10");
    require(c.transverse.n_modes >= 1 && c.transverse.n_modes <= c.transverse.n_radial,
            "transverse.n_modes", "must lie in [1, n_radial]");
    require(c.transverse.normalization == "flux-preserving" ||
                c.transverse.normalization == "unit-hilbert-schmidt",
            "transverse.normalization", "must be flux-preserving or unit-hilbert-schmidt");

    require(c.verify.n_prop >= 10, "verify.n_prop", "must be at least 10");
    require(c.verify.n_stokes >= 10, "verify.n_stokes", "must be at least 10");
    require(c.verify.stokes_c > 0.0, "verify.stokes_c", "must be positive");
    require(c.verify.flux_cases >= 1, "verify.flux_cases", "must be at least 1");

    const json th = to_json(c)["thresholds"];
    for (auto it = th.begin(); it != th.end(); ++it) {
        if (!(it.value().get<double>() > 0.0)) {
            problems.push_back("thresholds." + it.key() + ": must be positive");
        }
    }

    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid configuration";
        for (const auto& p : problems) {
            os << "\n  " << p;
        }
        throw DomainError(os.str());
    }
}

json override_patch(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw DomainError("override '" + assignment + "' must look like key.path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    std::vector<std::string> keys;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        keys.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    json patch = value;
    for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
        if (it->empty()) {
            throw DomainError("override '" + assignment + "' has an empty key");
        }
        patch = json{{*it, patch}};
    }
    return patch;
}

} // namespace ramanmem
