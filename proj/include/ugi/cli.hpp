#pragma once

// File formats and command implementations behind the `ugi` executable.
//
// MatrixFile:   {"rows": R, "cols": C, "data": [[[re, im], ...], ...]}
// ReportRecord: one JSON document per invocation with keys, in order,
//               command, kind, args, inputs, value, [conjecture], diagnostics, status.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ugi/errors.hpp"
#include "ugi/integrals.hpp"
#include "ugi/linalg.hpp"
#include "ugi/oracles.hpp"

namespace ugi::cli {

using Json = nlohmann::ordered_json;

/// Bad command-line usage (exit code 1).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

enum ExitCode : int { kOk = 0, kUsage = 1, kBadInput = 2, kNumerical = 3 };

inline constexpr double kVerifySeriesRelTol = 1e-6;
inline constexpr double kVerifySigma = 5.0;

// ---------------------------------------------------------------------------------------------
// MatrixFile

inline ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw InputError("matrix file needs rows, cols and data");
    if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned())
        throw InputError("rows and cols must be positive integers");
    const auto rows = j["rows"].get<std::size_t>();
    const auto cols = j["cols"].get<std::size_t>();
    if (rows == 0 || cols == 0) throw InputError("rows and cols must be positive integers");
    const Json& data = j["data"];
    if (!data.is_array() || data.size() != rows) throw InputError("data must have `rows` rows");
    std::vector<cplx> entries;
    entries.reserve(rows * cols);
    for (const Json& row : data) {
        if (!row.is_array() || row.size() != cols) throw InputError("every data row must have `cols` entries");
        for (const Json& e : row) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw InputError("every entry must be a [re, im] pair of numbers");
            entries.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

inline Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json data = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        data.push_back(std::move(row));
    }
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::move(data);
    return j;
}

inline ComplexMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open matrix file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError("matrix file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return matrix_from_json(j);
    } catch (const InputError& e) {
        throw InputError("matrix file '" + path + "': " + e.what());
    }
}

/// FNV-1a 64 of the canonical serialization.
inline std::string matrix_digest(const ComplexMatrix& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : matrix_to_json(m).dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------------------------
// Options and records

struct Options {
    std::string kind;
    std::string mode; // oracle only: "mc" or "series"
    std::optional<std::string> a, b, c, d;
    int nu = 0;
    int eta = 0;
    std::optional<int> n, m;
    std::size_t samples = 200000;
    int max_weight = 24;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool random = false;
    std::optional<std::string> out;
};

/// Seed default: $UGI_SEED when set and numeric, else 0.
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("UGI_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used, 0);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError("UGI_SEED is not an unsigned integer");
    }
    return 0;
}

inline std::string render(const Json& record) { return record.dump(2) + "\n"; }

struct Inputs {
    std::vector<std::pair<std::string, ComplexMatrix>> matrices;
    Json echo = Json::object();

    const ComplexMatrix& get(std::size_t i) const { return matrices.at(i).second; }
};

namespace detail {

inline std::vector<std::string> required_names(const std::string& kind) {
    if (kind == "i1" || kind == "i3") return {"a", "b"};
    if (kind == "i2" || kind == "i2rect") return {"a", "b", "c", "d"};
    throw UsageError("unknown integral kind '" + kind + "' (expected i1, i2, i2rect, i3)");
}

inline const std::optional<std::string>& path_of(const Options& o, const std::string& name) {
    if (name == "a") return o.a;
    if (name == "b") return o.b;
    if (name == "c") return o.c;
    return o.d;
}

inline Inputs load_inputs(const Options& o) {
    Inputs in;
    for (const auto& name : required_names(o.kind)) {
        const auto& path = path_of(o, name);
        if (!path) throw UsageError(o.kind + " needs --" + name);
        ComplexMatrix mat = load_matrix(*path);
        Json e;
        e["path"] = *path;
        e["rows"] = mat.rows();
        e["cols"] = mat.cols();
        e["digest"] = matrix_digest(mat);
        in.echo[name] = std::move(e);
        in.matrices.emplace_back(name, std::move(mat));
    }
    return in;
}

/// Matrices with i.i.d. entries uniform on the disk of radius 1/sqrt(N), drawn from a stream of
/// the seed that is disjoint from the Monte Carlo shards.
inline Inputs random_inputs(const Options& o) {
    if (!o.n || *o.n < 1) throw UsageError("--random needs --n >= 1");
    const auto n = static_cast<std::size_t>(*o.n);
    std::size_t m = n;
    if (o.kind == "i2rect") {
        if (!o.m || *o.m < 1) throw UsageError("--random i2rect needs --m >= 1");
        m = static_cast<std::size_t>(*o.m);
        if (m >= n) throw UsageError("i2rect needs M < N");
    }
    Rng rng(derive_seed(o.seed, 0x72616e646f6dULL));
    const double radius = 1.0 / std::sqrt(static_cast<double>(n));
    Inputs in;
    for (const auto& name : required_names(o.kind)) {
        const bool tall = name == "a" || name == "c";
        ComplexMatrix mat = o.kind == "i2rect" ? random_disk_matrix(tall ? n : m, tall ? m : n, radius, rng)
                                               : random_disk_matrix(n, n, radius, rng);
        Json e;
        e["random"] = true;
        e["rows"] = mat.rows();
        e["cols"] = mat.cols();
        e["digest"] = matrix_digest(mat);
        e["matrix"] = matrix_to_json(mat);
        in.echo[name] = std::move(e);
        in.matrices.emplace_back(name, std::move(mat));
    }
    return in;
}

inline Inputs inputs_for(const Options& o) { return o.random ? random_inputs(o) : load_inputs(o); }

inline void check_powers(const Options& o, bool allow_eta) {
    if (o.nu < 0) throw UsageError("--nu must be non-negative");
    if (!allow_eta && o.eta != 0) throw UsageError("--eta only applies to oracle mc i2rect");
    if ((o.kind == "i3" || o.kind == "i2rect") && o.nu != 0 && !allow_eta)
        throw UsageError(o.kind + " has no determinant insertion; use --nu 0");
}

inline Json spectrum_json(const Spectrum& s) {
    Json vals = Json::array();
    for (cplx z : s.values) vals.push_back(complex_to_json(z));
    return vals;
}

inline Json gap_json(double g) { return std::isfinite(g) ? Json(g) : Json(nullptr); }

inline Json args_json(const Options& o, bool with_seed, bool with_mc, bool with_series) {
    Json a;
    a["nu"] = o.nu;
    if (o.kind == "i2rect" && with_mc) a["eta"] = o.eta;
    if (o.random) {
        a["random"] = true;
        a["n"] = o.n.value_or(0);
        if (o.kind == "i2rect") a["m"] = o.m.value_or(0);
    }
    if (with_mc) a["samples"] = o.samples;
    if (with_series) a["max_weight"] = o.max_weight;
    if (with_seed) a["seed"] = o.seed;
    return a;
}

inline IntegralResult closed_form(const Options& o, const Inputs& in) {
    if (o.kind == "i1") return eval_i1(in.get(0), in.get(1), o.nu);
    if (o.kind == "i2") return eval_i2(in.get(0), in.get(1), in.get(2), in.get(3), o.nu);
    if (o.kind == "i2rect") return eval_i2_rect(in.get(0), in.get(1), in.get(2), in.get(3));
    return eval_i3(in.get(0), in.get(1));
}

inline Json closed_form_diagnostics(const IntegralResult& r) {
    Json d;
    Json spectra = Json::array();
    for (const auto& s : r.spectra_used) spectra.push_back(spectrum_json(s));
    d["spectra"] = std::move(spectra);
    d["min_gap"] = gap_json(r.min_gap_seen);
    d["confluent_path"] = r.confluent_path;
    d["kernel_truncation"] = r.kernel_truncation;
    return d;
}

inline MCEstimate monte_carlo(const Options& o, const Inputs& in) {
    const MCOptions opt{o.samples, o.seed, o.threads};
    if (o.kind == "i1") return mc_i1(in.get(0), in.get(1), o.nu, opt);
    if (o.kind == "i2") return mc_i2(in.get(0), in.get(1), in.get(2), in.get(3), o.nu, opt);
    if (o.kind == "i2rect") return mc_i2_rect_det(in.get(0), in.get(1), in.get(2), in.get(3), o.nu, o.eta, opt);
    return mc_i3(in.get(0), in.get(1), opt);
}

inline Json mc_json(const MCEstimate& e) {
    Json j;
    j["mean"] = complex_to_json(e.mean);
    j["stderr"] = Json::array({e.stderr_real, e.stderr_imag});
    j["samples"] = e.samples;
    j["seed"] = e.seed;
    j["norm_warning"] = e.norm_warning;
    return j;
}

inline bool has_series(const std::string& kind) { return kind == "i1" || kind == "i2"; }

inline SeriesEstimate series(const Options& o, const Inputs& in) {
    if (o.kind == "i1") return series_i1(in.get(0), in.get(1), o.nu, o.max_weight);
    if (o.kind == "i2") return series_i2(in.get(0), in.get(1), in.get(2), in.get(3), o.nu, o.max_weight);
    throw UsageError("no character-series oracle for " + o.kind + " (available: i1, i2)");
}

inline Json series_json(const SeriesEstimate& s) {
    Json j;
    j["value"] = complex_to_json(s.value);
    j["max_weight"] = s.max_weight;
    j["last_shell_magnitude"] = s.last_shell_magnitude;
    j["terms"] = s.terms;
    return j;
}

inline Json head(const std::string& command, const Options& o, Json args, const Inputs& in) {
    Json rec;
    rec["command"] = command;
    rec["kind"] = o.kind;
    rec["args"] = std::move(args);
    rec["inputs"] = in.echo;
    return rec;
}

inline double relative_error(cplx approx, cplx exact) {
    const double diff = std::abs(approx - exact);
    if (diff == 0.0) return 0.0;
    return diff / std::max(std::abs(exact), std::numeric_limits<double>::min());
}

} // namespace detail

/// `eval`: closed form of one integral.
inline Json run_eval(const Options& o) {
    detail::required_names(o.kind);
    detail::check_powers(o, false);
    if (o.random) throw UsageError("eval takes matrix files, not --random");
    const Inputs in = detail::inputs_for(o);
    const IntegralResult r = detail::closed_form(o, in);
    Json rec = detail::head("eval", o, detail::args_json(o, false, false, false), in);
    rec["value"] = complex_to_json(r.value);
    if (r.conjecture) rec["conjecture"] = true;
    rec["diagnostics"] = detail::closed_form_diagnostics(r);
    rec["status"] = "ok";
    return rec;
}

/// `oracle mc|series`: one ground-truth estimate.
inline Json run_oracle(const Options& o) {
    detail::required_names(o.kind);
    if (o.mode != "mc" && o.mode != "series") throw UsageError("oracle mode must be mc or series");
    const bool mc = o.mode == "mc";
    detail::check_powers(o, mc && o.kind == "i2rect");
    if (!mc && !detail::has_series(o.kind))
        throw UsageError("no character-series oracle for " + o.kind + " (available: i1, i2)");
    if (mc && o.samples < kMinSamples) throw UsageError("--samples must be >= 100");
    if (!mc && o.max_weight < 0) throw UsageError("--max-weight must be >= 0");
    const Inputs in = detail::inputs_for(o);
    Json rec = detail::head("oracle", o, detail::args_json(o, true, mc, !mc), in);
    rec["mode"] = o.mode;
    if (mc) {
        const MCEstimate e = detail::monte_carlo(o, in);
        rec["value"] = complex_to_json(e.mean);
        rec["diagnostics"] = detail::mc_json(e);
        rec["status"] = e.norm_warning ? "warn" : "ok";
    } else {
        const SeriesEstimate s = detail::series(o, in);
        rec["value"] = complex_to_json(s.value);
        rec["diagnostics"] = detail::series_json(s);
        rec["status"] = "ok";
    }
    return rec;
}

/// `verify`: closed form against the series oracle (where one exists) and Monte Carlo.
/// Status is "fail" iff the series differs by more than 1e-6 relative or MC by more than 5 sigma.
inline Json run_verify(const Options& o) {
    detail::required_names(o.kind);
    detail::check_powers(o, false);
    if (o.samples < kMinSamples) throw UsageError("--samples must be >= 100");
    if (o.max_weight < 0) throw UsageError("--max-weight must be >= 0");
    const Inputs in = detail::inputs_for(o);
    const IntegralResult r = detail::closed_form(o, in);

    Json rec = detail::head("verify", o, detail::args_json(o, true, true, detail::has_series(o.kind)), in);
    rec["value"] = complex_to_json(r.value);
    if (r.conjecture) rec["conjecture"] = true;

    bool fail = false;
    Json diag;
    diag["closed_form"] = detail::closed_form_diagnostics(r);
    if (detail::has_series(o.kind)) {
        const SeriesEstimate s = detail::series(o, in);
        Json sj = detail::series_json(s);
        const double rel = detail::relative_error(s.value, r.value);
        sj["relative_error"] = rel;
        fail = fail || !(rel <= kVerifySeriesRelTol);
        diag["series"] = std::move(sj);
    } else {
        diag["series"] = nullptr;
    }
    const MCEstimate e = detail::monte_carlo(o, in);
    Json mj = detail::mc_json(e);
    const double z = z_score(e, r.value);
    mj["z_score"] = std::isfinite(z) ? Json(z) : Json(nullptr);
    fail = fail || !within_sigma(e, r.value, kVerifySigma);
    diag["mc"] = std::move(mj);
    diag["thresholds"] = {{"series_relative", kVerifySeriesRelTol}, {"mc_sigma", kVerifySigma}};
    rec["diagnostics"] = std::move(diag);
    rec["status"] = fail ? "fail" : (e.norm_warning ? "warn" : "ok");
    return rec;
}

/// Runs a command, writes the record to `out` (and --out), maps failures to exit codes.
template <typename Command>
int run_and_report(Command&& command, const Options& o, std::ostream& out, std::ostream& err) {
    try {
        const std::string text = render(command(o));
        out << text;
        if (o.out) {
            std::ofstream f(*o.out, std::ios::binary);
            if (!f) throw InputError("cannot write --out file '" + *o.out + "'");
            f << text;
        }
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kBadInput;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    }
}

} // namespace ugi::cli
