#include "sandwichkit/app.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    namespace app = sandwichkit::app;
    app::Options o;
    o.mode = app::default_mode();

    CLI::App cli{"Exact verification of convex duality and sandwich identities on polyhedral data"};
    cli.require_subcommand(1);
    cli.add_option("--mode", o.mode, "exact or float (default from SANDWICHKIT_MODE, else exact)");
    cli.add_option("--tolerance", o.tolerance, "zero tolerance for float mode, as a rational");
    cli.add_option("--report", o.report, "json or text");
    cli.add_flag("--crosscheck", o.crosscheck, "attach oracle brackets to every verify record");
    cli.add_option("--seed", o.seed, "seed for random probes and selftest");

    auto file_cmd = [&](const char* name, const char* help) {
        auto* sub = cli.add_subcommand(name, help);
        sub->add_option("file", o.input, "scenario file")->required();
        sub->fallthrough();
        return sub;
    };
    file_cmd("verify", "verify the task's identity (a directory runs every *.json in it)");
    file_cmd("sandwich", "separator, T and the hypothesis for a sandwich task");
    file_cmd("interiority", "interiority margin, automatic level and covering probes for a sublevel task");
    file_cmd("theorem20", "the three equivalent sublevel conditions");
    for (const char* name : {"eval", "conjugate"}) {
        auto* sub = file_cmd(name, name == std::string("eval") ? "value of a named function" : "conjugate of a named function");
        sub->add_option("--function", o.function, "function name")->required();
        sub->add_option("--at", o.at, "point or covector, comma separated")->required();
    }
    cli.add_subcommand("selftest", "random property suites")->fallthrough();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? 0 : app::exit_code::input;
    }
    o.command = cli.get_subcommands().front()->get_name();
    auto r = app::run(o);
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}
