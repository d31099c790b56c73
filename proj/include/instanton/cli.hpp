#pragma once
// Command dispatch behind the command-line harness: a RunConfig describes one
// invocation (command, inputs, parameters, output); run() executes it and
// writes the requested reports or data files.
//
// Report layout (format "json", the default for check commands): a JSON-lines
// stream whose first line records the library version, field, prime (when
// working over Fp), truncation bound, seed, and trial count, followed by one
// line per check.  Format "csv" emits the aggregated summary instead.  Data
// commands (sample, restrict, cohomology, hirzebruch build/normalize, adhm
// impose/convert) send their primary data to the output path and keep any
// report on stdout.  Nothing time-dependent is ever serialized, so identical
// (command, seed, inputs) produce byte-identical files.

#include "io.hpp"

#include <iostream>
#include <utility>

namespace instanton {

struct RunConfig {
    std::string command;                      // subcommand name
    std::string subop;                        // hirzebruch/adhm sub-operation
    std::vector<std::string> inputs;          // input file paths
    std::vector<std::pair<int, int>> grid;    // (r, n) cells for batch runs
    int r = 2;
    int n = 1;
    uint64_t seed = 1;
    int trials = 0;                           // 0 = per-command default
    int bound = 0;                            // series truncation bound; 0 = automatic
    Field field = Field::rationals();
    std::string out;                          // output path; empty = stdout
    std::string format;                       // "json" | "csv"; empty = command default
    int klo = -4, khi = 2;                    // twist window
};

namespace detail {

inline int trials_or(const RunConfig& cfg, int dflt) {
    return cfg.trials > 0 ? cfg.trials : dflt;
}

inline void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty())
        std::cout << text;
    else
        write_file(cfg.out, text);
}

inline std::string meta_line(const RunConfig& cfg, const Field& F, int trials) {
    std::string cmd = cfg.command + (cfg.subop.empty() ? "" : " " + cfg.subop);
    std::string out = "{\"version\":\"" + std::string(library_version) + "\",\"command\":\"" +
                      cmd + "\",\"field\":\"" + F.str() + "\"";
    if (F.tag == FieldTag::Fp) out += ",\"prime\":" + std::to_string(F.p);
    out += ",\"bound\":" + std::to_string(cfg.bound) +
           ",\"seed\":" + std::to_string(cfg.seed) +
           ",\"trials\":" + std::to_string(trials) + "}";
    return out;
}

// serialize reports per cfg.format and return the exit status (0 iff all pass)
inline int emit_reports(const RunConfig& cfg, const Field& F, int trials,
                        std::vector<CheckReport> reports, bool to_stdout = false) {
    SuiteResult sr;
    sr.pass = true;
    for (auto& r : reports) {
        if (!r.pass) sr.pass = false;
        sr.reports.push_back(std::move(r));
    }
    std::string text;
    if (cfg.format == "csv") {
        text = sr.summary_csv();
    } else {
        text = meta_line(cfg, F, trials) + "\n" + sr.jsonl();
    }
    if (to_stdout)
        std::cout << text;
    else
        emit(cfg, text);
    return sr.pass ? 0 : 1;
}

inline void need_inputs(const RunConfig& cfg, size_t k) {
    if (cfg.inputs.size() != k)
        throw std::runtime_error("usage: '" + cfg.command + "' expects " + std::to_string(k) +
                                 " input file" + (k == 1 ? "" : "s"));
}

inline Monad load_monad(const std::string& path, int trials, uint64_t seed) {
    Monad m = parse_monad_json(read_file(path));
    validate(m, static_cast<size_t>(trials), seed);
    if (!m.validated)
        throw std::runtime_error("input '" + path + "' does not validate as a monad complex");
    return m;
}

inline std::vector<Scalar> random_plane(Rng& rng, const Field& F) {
    for (;;) {
        std::vector<Scalar> H;
        bool nonzero = false;
        for (int j = 0; j < 4; ++j) {
            H.push_back(random_scalar(rng, F, -5, 5));
            nonzero = nonzero || !H.back().is_zero();
        }
        if (nonzero) return H;
    }
}

// wrap a ValidationReport (or conversion report) as a single check line
inline CheckReport wrap_validation(const std::string& name, const std::string& inputs,
                                   const ValidationReport& rep, bool accepted) {
    CheckReport out;
    out.name = name;
    out.inputs = inputs;
    out.expected = "all validation certificates hold";
    size_t good = 0;
    for (const auto& it : rep.items) good += it.passed ? 1 : 0;
    out.computed = std::to_string(good) + " of " + std::to_string(rep.items.size()) +
                   " certificates hold";
    for (const auto& it : rep.items)
        out.notes.push_back(std::string(it.passed ? "[pass] " : "[FAIL] ") + it.name + ": " +
                            it.detail);
    out.pass = accepted;
    return out;
}

// ---------------------------------------------------------------------------
// command handlers

inline int cmd_sample(const RunConfig& cfg) {
    if (cfg.field.tag == FieldTag::Q) {
        emit(cfg, monad_to_json(sample_instanton(cfg.r, cfg.n, cfg.seed)));
        return 0;
    }
    if (cfg.field.tag == FieldTag::Qi) {
        emit(cfg, monad_to_json(lift_to_gaussian(sample_instanton(cfg.r, cfg.n, cfg.seed))));
        return 0;
    }
    // prime field: reduce a rational sample, resampling if the reduction
    // degenerates mod p
    for (uint64_t tweak = 0; tweak < 8; ++tweak) {
        Monad mq = sample_instanton(cfg.r, cfg.n, cfg.seed + tweak);
        Monad mp = make_monad(Space::p3(), cfg.r, cfg.n,
                              formmatrix_reduce_mod(mq.epsilon, cfg.field.p),
                              formmatrix_reduce_mod(mq.q, cfg.field.p));
        validate(mp, 16, cfg.seed + tweak);
        if (mp.validated) {
            emit(cfg, monad_to_json(mp));
            return 0;
        }
    }
    throw std::runtime_error("sample: reduction mod " + std::to_string(cfg.field.p) +
                             " kept degenerating; try another seed or prime");
}

inline int cmd_validate(const RunConfig& cfg) {
    need_inputs(cfg, 1);
    int trials = trials_or(cfg, 24);
    Monad m = parse_monad_json(read_file(cfg.inputs[0]));
    ValidationReport rep = validate(m, static_cast<size_t>(trials), cfg.seed);
    CheckReport wrapped =
        wrap_validation("validate", monad_digest(m), rep, rep.ok());
    return emit_reports(cfg, m.field(), trials, {std::move(wrapped)});
}

inline int cmd_cohomology(const RunConfig& cfg) {
    need_inputs(cfg, 1);
    int trials = trials_or(cfg, 24);
    Monad m = load_monad(cfg.inputs[0], trials, cfg.seed);
    // table commands default to the compact CSV layout
    if (cfg.format == "json")
        emit(cfg, monad_cohomology_table(m, cfg.klo, cfg.khi).json());
    else
        emit(cfg, cohomology_wide_csv(m, cfg.klo, cfg.khi));
    return 0;
}

inline int cmd_restrict(const RunConfig& cfg) {
    need_inputs(cfg, 1);
    int trials = trials_or(cfg, 24);
    Monad m = load_monad(cfg.inputs[0], trials, cfg.seed);
    Rng rng(cfg.seed);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Monad flat = restrict_hyperplane(m, random_plane(rng, m.field()));
        validate(flat, static_cast<size_t>(trials), cfg.seed + 1);
        if (!flat.validated) continue;
        if (cfg.format == "json")
            emit(cfg, monad_cohomology_table(flat, cfg.klo, cfg.khi).json());
        else
            emit(cfg, cohomology_wide_csv(flat, cfg.klo, cfg.khi));
        return 0;
    }
    throw std::runtime_error("restrict: no sampled hyperplane gave a valid restriction");
}

inline int cmd_splitting(const RunConfig& cfg) {
    need_inputs(cfg, 1);
    int trials = trials_or(cfg, 20);
    Monad m = load_monad(cfg.inputs[0], 24, cfg.seed);
    Rng rng(cfg.seed);
    CheckReport rep;
    rep.name = "splitting";
    rep.inputs = monad_digest(m) + " lines=" + std::to_string(trials);
    rep.expected = "trivial splitting on a general line";
    size_t trivial = 0;
    for (int t = 0; t < trials; ++t) {
        Line L = random_line(rng, m.field());
        try {
            SplittingType s = splitting_type(m, L);
            if (s.trivial())
                trivial += 1;
            else
                rep.notes.push_back("jumping line with splitting " + s.str());
        } catch (const std::exception& ex) {
            rep.notes.push_back(std::string("line skipped: ") + ex.what());
        }
    }
    rep.computed = std::to_string(trivial) + " of " + std::to_string(trials) +
                   " sampled lines split trivially";
    rep.pass = trivial > 0;
    return emit_reports(cfg, m.field(), trials, {std::move(rep)});
}

inline int cmd_single_check(const RunConfig& cfg) {
    need_inputs(cfg, 1);
    int trials = trials_or(cfg, 24);
    Monad m = load_monad(cfg.inputs[0], trials, cfg.seed);
    CheckReport rep;
    if (cfg.command == "end-check")
        rep = check_end_dims(m);
    else if (cfg.command == "tangent-check")
        rep = check_tangent_dimension(m);
    else if (cfg.command == "koszul-check")
        rep = check_koszul_dims(m, cfg.seed);
    else if (cfg.command == "mayer-vietoris")
        rep = check_mayer_vietoris(m, cfg.seed);
    else
        rep = check_quadric_splitting(m, cfg.bound);
    return emit_reports(cfg, m.field(), trials, {std::move(rep)});
}

inline int cmd_tensor_check(const RunConfig& cfg) {
    need_inputs(cfg, 2);
    int trials = trials_or(cfg, 24);
    Monad a = load_monad(cfg.inputs[0], trials, cfg.seed);
    Monad b = load_monad(cfg.inputs[1], trials, cfg.seed + 1);
    CheckReport rep = check_tensor_vanishing(a, b, cfg.bound);
    return emit_reports(cfg, a.field(), trials, {std::move(rep)});
}

inline int cmd_hirzebruch(const RunConfig& cfg) {
    if (cfg.subop == "build") {
        Rng rng(cfg.seed);
        // -n plays the role of the fiber-support length here
        emit(cfg, extension_to_json(random_extension_data(rng, cfg.field, cfg.n, cfg.r)));
        return 0;
    }
    if (cfg.subop == "normalize") {
        need_inputs(cfg, 1);
        ExtensionData e = parse_extension_json(read_file(cfg.inputs[0]));
        auto [w, e1] = normalize_u1_slice(e);
        (void)w;
        CheckReport rep;
        rep.name = "hirzebruch-normalize";
        rep.inputs = "m=" + std::to_string(e.m) + " r=" + std::to_string(e.r) +
                     " field=" + e.field.str();
        rep.expected = "slice representative: [III] = 0, idempotent";
        bool zeroed = true;
        for (const Scalar& s : block_III(e1).a) zeroed = zeroed && s.is_zero();
        auto [w2, e2] = normalize_u1_slice(e1);
        (void)w2;
        bool idem = extension_to_json(e2) == extension_to_json(e1);
        rep.computed = std::string(zeroed ? "[III] zeroed" : "[III] NONZERO") + ", " +
                       (idem ? "idempotent" : "NOT idempotent");
        rep.pass = zeroed && idem;
        if (!cfg.out.empty()) write_file(cfg.out, extension_to_json(e1));
        return emit_reports(cfg, e.field, 1, {std::move(rep)}, /*to_stdout=*/true);
    }
    if (cfg.subop == "act") {
        need_inputs(cfg, 1);
        int trials = trials_or(cfg, 5);
        ExtensionData e = parse_extension_json(read_file(cfg.inputs[0]));
        QuotientRing R = ring_of(e);
        int rho = generic_splitting(e.m, e.r).second;
        Rng rng(cfg.seed);
        CheckReport rep;
        rep.name = "hirzebruch-act";
        rep.inputs = "m=" + std::to_string(e.m) + " r=" + std::to_string(e.r) +
                     " field=" + e.field.str() + " trials=" + std::to_string(trials);
        rep.expected = "cohomology tables invariant under the group actions";
        auto tables = [&](const ExtensionData& d) {
            QuadricBundlePresentation P = build_quadric_bundle(d);
            std::vector<size_t> flat;
            for (int k1 = -2; k1 <= 2; ++k1)
                for (int k2 = -2; k2 <= 2; ++k2) {
                    auto h = v_cohomology(P, k1, k2);
                    flat.insert(flat.end(), h.begin(), h.end());
                }
            return flat;
        };
        std::vector<size_t> base = tables(e);
        size_t good = 0;
        for (int t = 0; t < trials; ++t) {
            AutLElement w = random_aut(rng, e.field, e.r, rho);
            QuotientRingElement u;
            do {
                std::vector<Scalar> c;
                for (int j = 0; j < e.m; ++j) c.push_back(random_scalar(rng, e.field, -4, 4));
                u = qre_from_scalars(R, c);
            } while (!qre_invertible(R, u));
            bool same = tables(aut_action(w, e)) == base && tables(t_action(u, e)) == base;
            if (same)
                good += 1;
            else
                rep.notes.push_back("trial " + std::to_string(t) +
                                    ": table changed under the action");
        }
        rep.computed = std::to_string(good) + " of " + std::to_string(trials) +
                       " trials left every table unchanged";
        rep.pass = good == static_cast<size_t>(trials);
        return emit_reports(cfg, e.field, trials, {std::move(rep)});
    }
    throw std::runtime_error("usage: hirzebruch expects a sub-operation build|normalize|act");
}

inline int cmd_adhm(const RunConfig& cfg) {
    if (cfg.subop == "impose") {
        // unit charge over an even rank: the conjugate-completion draw also
        // satisfies the complex condition, so the data converts downstream
        if (cfg.n == 1 && cfg.r % 2 == 0) {
            emit(cfg, adhm_to_json(solve_unit_charge(cfg.seed, cfg.r).data));
            return 0;
        }
        Field F = Field::gaussian();
        Rng rng(cfg.seed);
        ADHMData d;
        d.r = cfg.r;
        d.n = cfg.n;
        size_t rows = static_cast<size_t>(cfg.r) + 2 * static_cast<size_t>(cfg.n);
        for (auto& L : d.left) L = random_matrix(rng, F, rows, static_cast<size_t>(cfg.n), -4, 4);
        d = impose_quaternionic(d.left);
        emit(cfg, adhm_to_json(d));
        return 0;
    }
    if (cfg.subop == "convert") {
        need_inputs(cfg, 1);
        int trials = trials_or(cfg, 24);
        ADHMData d = parse_adhm_json(read_file(cfg.inputs[0]));
        ADHMConversion conv = adhm_to_monad(d, static_cast<size_t>(trials), cfg.seed);
        CheckReport rep = wrap_validation(
            "adhm-convert", "r=" + std::to_string(d.r) + " n=" + std::to_string(d.n),
            conv.report, conv.accepted);
        if (conv.accepted && !cfg.out.empty()) write_file(cfg.out, monad_to_json(*conv.monad));
        return emit_reports(cfg, d.left[0].field, trials, {std::move(rep)},
                            /*to_stdout=*/!cfg.out.empty());
    }
    if (cfg.subop == "real-check") {
        need_inputs(cfg, 1);
        int trials = trials_or(cfg, 20);
        Monad m = parse_monad_json(read_file(cfg.inputs[0]));
        if (m.field().tag == FieldTag::Q) m = lift_to_gaussian(m);
        validate(m, 24, cfg.seed);
        if (!m.validated)
            throw std::runtime_error("input does not validate as a monad complex");
        Rng rng(cfg.seed ^ 0x706cull);
        std::vector<CheckReport> reps;
        reps.push_back(check_real_line_trivial(m, static_cast<size_t>(trials), cfg.seed));
        reps.push_back(check_atiyah_pair(m, random_plane(rng, m.field()), cfg.seed));
        return emit_reports(cfg, m.field(), trials, std::move(reps));
    }
    throw std::runtime_error("usage: adhm expects a sub-operation impose|convert|real-check");
}

inline int cmd_suite(const RunConfig& cfg) {
    if (cfg.grid.empty())
        throw std::runtime_error("usage: suite needs a --grid of r:n cells");
    size_t total = cfg.trials > 0 ? static_cast<size_t>(cfg.trials) : 20;
    SuiteResult sr = run_suite(cfg.grid, cfg.seed, total);
    std::string jsonl = meta_line(cfg, cfg.field, static_cast<int>(total)) + "\n" + sr.jsonl();
    if (cfg.format == "csv") {
        emit(cfg, sr.summary_csv());
    } else {
        emit(cfg, jsonl);
        if (!cfg.out.empty()) {
            // batch runs keep a CSV summary next to the JSON-lines report
            std::string stem = cfg.out;
            size_t dot = stem.find_last_of('.');
            if (dot != std::string::npos && stem.find('/', dot) == std::string::npos)
                stem = stem.substr(0, dot);
            write_file(stem + ".csv", sr.summary_csv());
        }
    }
    return sr.pass ? 0 : 1;
}

inline int cmd_roundtrip(const RunConfig& cfg) {
    need_inputs(cfg, 1);
    bool ok = roundtrip_file(cfg.inputs[0]);
    std::cout << (ok ? "canonical\n" : "not canonical\n");
    return ok ? 0 : 1;
}

} // namespace detail

// Dispatch a parsed configuration.  Returns the process exit status: 0 when
// every hard assertion passed, 1 when a check failed, and throws on usage or
// I/O problems (the front end maps those to status 2).
inline int run(const RunConfig& cfg) {
    const std::string& c = cfg.command;
    if (c == "sample") return detail::cmd_sample(cfg);
    if (c == "validate") return detail::cmd_validate(cfg);
    if (c == "cohomology") return detail::cmd_cohomology(cfg);
    if (c == "tensor-check") return detail::cmd_tensor_check(cfg);
    if (c == "end-check" || c == "tangent-check" || c == "koszul-check" ||
        c == "mayer-vietoris" || c == "quadric-split")
        return detail::cmd_single_check(cfg);
    if (c == "restrict") return detail::cmd_restrict(cfg);
    if (c == "splitting") return detail::cmd_splitting(cfg);
    if (c == "hirzebruch") return detail::cmd_hirzebruch(cfg);
    if (c == "adhm") return detail::cmd_adhm(cfg);
    if (c == "suite") return detail::cmd_suite(cfg);
    if (c == "roundtrip") return detail::cmd_roundtrip(cfg);
    throw std::runtime_error("unknown command '" + c + "'");
}

// parse "a:b" into a twist window
inline std::pair<int, int> parse_twist_range(const std::string& text) {
    size_t colon = text.find(':', text.empty() || text[0] != '-' ? 0 : 1);
    if (colon == std::string::npos)
        throw std::runtime_error("twist range must look like lo:hi, got '" + text + "'");
    size_t pos = 0;
    int lo = std::stoi(text, &pos);
    if (pos != colon) throw std::runtime_error("twist range must look like lo:hi");
    int hi = std::stoi(text.substr(colon + 1), &pos);
    if (colon + 1 + pos != text.size() || lo > hi)
        throw std::runtime_error("twist range must look like lo:hi with lo <= hi");
    return {lo, hi};
}

// parse "2:1,2:2,3:3" into (r, n) grid cells
inline std::vector<std::pair<int, int>> parse_grid(const std::string& text) {
    std::vector<std::pair<int, int>> grid;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t comma = text.find(',', pos);
        std::string cell = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        size_t colon = cell.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == cell.size())
            throw std::runtime_error("grid cells must look like r:n, got '" + cell + "'");
        grid.push_back({std::stoi(cell.substr(0, colon)), std::stoi(cell.substr(colon + 1))});
        pos = comma == std::string::npos ? text.size() : comma + 1;
    }
    if (grid.empty()) throw std::runtime_error("grid must contain at least one r:n cell");
    return grid;
}

} // namespace instanton
