// Command-line front end: parses flags into a RunConfig and dispatches.
// Exit codes: 0 all assertions passed, 1 a check failed, 2 usage or I/O error.
#include "instanton/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace instanton;

int main(int argc, char** argv) {
    CLI::App app{"exact monad calculus for rank-r charge-n bundles on P3"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string field_text = "Q";
    std::string twists_text;
    std::string grid_text;

    auto add_common = [&](CLI::App* sub, bool with_rn) {
        sub->add_option("--seed", cfg.seed, "random seed (all randomness flows from it)");
        sub->add_option("--trials", cfg.trials, "sample/trial count (0 = command default)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--bound", cfg.bound, "series truncation bound (0 = automatic)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--field", field_text, "coefficient field: Q, Qi, or Fp:<p>");
        sub->add_option("-o,--out", cfg.out, "output path (default stdout)");
        sub->add_option("--format", cfg.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        if (with_rn) {
            sub->add_option("-r", cfg.r, "bundle rank");
            sub->add_option("-n", cfg.n, "second Chern class (charge)");
        }
    };
    auto add_inputs = [&](CLI::App* sub, int k) {
        sub->add_option("inputs", cfg.inputs, "input file(s)")->expected(k);
    };

    add_common(app.add_subcommand("sample", "draw a monad and write its JSON file"), true);
    add_inputs(app.add_subcommand("validate", "check the complex and rank certificates"), 1);
    auto* coh = app.add_subcommand("cohomology", "cohomology table over a twist window");
    add_inputs(coh, 1);
    coh->add_option("--twists", twists_text, "twist window lo:hi (default -4:2)");
    add_inputs(app.add_subcommand("tensor-check", "vanishing ranges of a tensor pair"), 2);
    add_inputs(app.add_subcommand("end-check", "endomorphism cohomology dimensions"), 1);
    add_inputs(app.add_subcommand("tangent-check", "deformation-space dimension count"), 1);
    auto* res = app.add_subcommand("restrict", "cohomology of a random plane restriction");
    add_inputs(res, 1);
    res->add_option("--twists", twists_text, "twist window lo:hi (default -4:2)");
    add_inputs(app.add_subcommand("splitting", "splitting types on sampled lines"), 1);
    add_inputs(app.add_subcommand("koszul-check", "restriction dimensions via the plane sequence"),
               1);
    add_inputs(app.add_subcommand("mayer-vietoris", "two-plane assembly of endomorphism data"), 1);
    add_inputs(app.add_subcommand("quadric-split", "pushforward profile on the quadric"), 1);

    auto* hz = app.add_subcommand("hirzebruch", "extension-data calculus on ruled surfaces");
    hz->require_subcommand(1);
    add_common(hz->add_subcommand("build", "draw extension data (-n = support length)"), true);
    add_inputs(hz->add_subcommand("normalize", "move data onto the canonical slice"), 1);
    auto* act = hz->add_subcommand("act", "group-action invariance of cohomology tables");
    add_inputs(act, 1);
    add_common(hz->get_subcommand("normalize"), false);
    add_common(act, false);

    auto* ad = app.add_subcommand("adhm", "constrained quaternionic matrix data");
    ad->require_subcommand(1);
    add_common(ad->add_subcommand("impose", "draw data satisfying the adjoint constraints"), true);
    add_inputs(ad->add_subcommand("convert", "turn constrained data into a monad"), 1);
    add_inputs(ad->add_subcommand("real-check", "twistor-line and conjugate-plane checks"), 1);
    add_common(ad->get_subcommand("convert"), false);
    add_common(ad->get_subcommand("real-check"), false);

    auto* suite = app.add_subcommand("suite", "run every checker over an (r, n) grid");
    suite->add_option("--grid", grid_text, "comma-separated r:n cells, e.g. 2:1,2:2")->required();
    add_common(suite, false);

    add_inputs(app.add_subcommand("roundtrip", "verify a file is in canonical form"), 1);

    // flags shared by the simple single-input commands
    for (const char* name : {"validate", "cohomology", "tensor-check", "end-check",
                             "tangent-check", "restrict", "splitting", "koszul-check",
                             "mayer-vietoris", "quadric-split"})
        add_common(app.get_subcommand(name), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        cfg.command = sub->get_name();
        if (!sub->get_subcommands().empty()) cfg.subop = sub->get_subcommands().front()->get_name();
        cfg.field = Field::parse(field_text);
        if (!twists_text.empty()) {
            auto [lo, hi] = parse_twist_range(twists_text);
            cfg.klo = lo;
            cfg.khi = hi;
        }
        if (!grid_text.empty()) cfg.grid = parse_grid(grid_text);
        return run(cfg);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
