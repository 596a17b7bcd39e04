#include "acceptance.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace birkhoff::acceptance;

// Exit status: 0 all selected criteria pass, 1 any fails, 77 only skips.
int main(int argc, char** argv)
{
    CLI::App app{"Acceptance suite"};
    Options opt;
    std::string nino;
    app.add_option("--seed", opt.seed, "global seed");
    app.add_option("--only", opt.only, "criterion ids")->delimiter(',');
    app.add_option("--nino34", nino, "Nino-3.4 CSV");
    app.add_option("--scratch", opt.scratch_dir, "scratch directory");
    CLI11_PARSE(app, argc, argv);
    opt.nino34_csv = nino;
    const auto results = run_all(opt, std::cout);
    bool failed = false, ran = false;
    for (const auto& r : results) {
        failed = failed || r.status == Status::Fail;
        ran = ran || r.status == Status::Pass;
    }
    if (failed)
        return 1;
    return ran ? 0 : 77;
}
