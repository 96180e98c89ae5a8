// shearlab: command-line front end for the workbench.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "shearlab/workbench.hpp"

using namespace shearlab;

namespace {

SaturationParams parse_saturation(const std::string& s)
{
    auto p = split(s, ',');
    if (p.size() != 3) throw InputError("--saturation expects window,multiplicity,rounds");
    SaturationParams out{parse_int(p[0]), parse_int(p[1]), parse_int(p[2])};
    if (out.window < 1 || out.multiplicity < 1 || out.rounds < 0) throw InputError("bad saturation parameters");
    return out;
}

int emit(const json& report, const std::vector<std::string>& text, bool as_json, const std::string& out_path)
{
    if (!out_path.empty()) {
        std::ofstream o(out_path);
        if (!o) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        o << report.dump(2) << "\n";
    }
    if (as_json) {
        std::cout << report.dump(2) << "\n";
    } else {
        for (const auto& l : text) std::cout << l << "\n";
    }
    return report.at("exit_code").get<int>();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"shearlab: shearing, dividing and circle-property workbench"};
    app.require_subcommand(1);
    JobSpec job;
    bool as_json = false;
    std::string out_path, sat = "3,2,2";

    auto common = [&](CLI::App* c) {
        c->add_flag("--json", as_json, "print the JSON report");
        c->add_option("-o,--out", out_path, "also write the JSON report here");
    };

    auto* t32 = app.add_subcommand("verify-t32", "verify the T_{3,2} shearing witness");
    t32->add_option("--mutate", job.mutate, "mutation to apply first")->check(CLI::IsMember({"drop-edge"}));
    t32->add_option("--core-bound", job.core_bound, "largest core searched");
    common(t32);

    auto* tnk = app.add_subcommand("verify-tnk", "build and verify a T_{n,k} unsuperstability certificate");
    tnk->add_option("--n", job.n)->required();
    tnk->add_option("--k", job.k)->required();
    tnk->add_option("--levels", job.levels, "chain length");
    tnk->add_option("--core-bound", job.core_bound);
    common(tnk);

    auto* circ = app.add_subcommand("check-circle", "search the circle property over a context");
    circ->add_option("--context", job.context, "builtin name or structure JSON file");
    circ->add_option("--i0-bound", job.i0_bound, "largest I0 in the sweep");
    circ->add_option("--max-i1", job.max_I1, "largest I1");
    circ->add_option("--saturation", sat, "window,multiplicity,rounds");
    common(circ);

    auto* trg = app.add_subcommand("trg-superstable", "bounded T_rg shearing search over c_{n,k}");
    trg->add_option("--n", job.n);
    trg->add_option("--k", job.k);
    trg->add_option("--i0-bound", job.i0_bound);
    trg->add_option("--max-i1", job.max_I1);
    trg->add_option("--max-slots", job.max_slots);
    trg->add_option("--patterns", job.patterns, "random coherent patterns to analyse");
    trg->add_option("--seed", job.seed);
    trg->add_option("--saturation", sat);
    common(trg);

    auto* suite = app.add_subcommand("property-suite", "run the invariant suites");
    suite->add_option("--seed", job.seed);
    suite->add_option("--instances", job.instances, "random instances per oracle check");
    suite->add_flag("--quick", job.quick, "smaller run");
    suite->add_option("--mutate", job.mutate)->check(CLI::IsMember({"drop-edge", "fixed-point"}));
    common(suite);

    // trg defaults differ from check-circle
    trg->preparse_callback([&](size_t) {
        job.max_I1 = 3;
        job.i0_bound = 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    job.command = app.get_subcommands().front()->get_name();

    auto t0 = std::chrono::steady_clock::now();
    try {
        job.saturation = parse_saturation(sat);
        auto r = run_job(job);
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return emit(make_report(job, r, ms), r.text, as_json, out_path);
    } catch (const BudgetError& e) {
        return emit(error_report(job, 3, "budget", e.what()), {std::string("refused: ") + e.what()}, as_json, out_path);
    } catch (const DepthError& e) {
        return emit(error_report(job, 3, "depth", e.what()), {std::string("refused: ") + e.what()}, as_json, out_path);
    } catch (const InputError& e) {
        return emit(error_report(job, 2, "input", e.what()), {std::string("input error: ") + e.what()}, as_json,
                    out_path);
    } catch (const std::exception& e) {
        return emit(error_report(job, 1, "internal", e.what()), {std::string("error: ") + e.what()}, as_json,
                    out_path);
    }
}
