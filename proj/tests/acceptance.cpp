// Acceptance run: one PASS/FAIL line per criterion, exact arithmetic throughout.
//
//   acceptance <path to sandwichkit CLI> <corpus directory>
//
// Suite sizes, the seed and the time budgets are pinned below.

#include "sandwichkit/properties.hpp"

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

using namespace sandwichkit;

namespace {

constexpr std::uint64_t seed = 1;

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

Outcome from_suite(const props::SuiteResult& r)
{
    std::string d = std::to_string(r.cases) + " cases, " + std::to_string(r.failures) + " failures";
    if (r.inconclusive)
        d += ", " + std::to_string(r.inconclusive) + " inconclusive";
    if (!r.first_failure.empty())
        d += "; first: " + r.first_failure;
    return {r.passed(), d};
}

Outcome suite(const std::function<props::SuiteResult(props::Rng&)>& f)
{
    props::Rng rng(seed);
    return from_suite(f(rng));
}

// Exit codes documented for the bundled corpus.
const std::map<std::string, int> corpus_exits{
    {"bibivariate.json", 0},
    {"broken.json", 3},
    {"fenchel_boundary_contact.json", 2},
    {"fenchel_closed_subspace.json", 0},
    {"fenchel_sum.json", 0},
    {"indicator_linear.json", 0},
    {"indicator_linear_infinite.json", 2},
    {"interiority_covering.json", 0},
    {"partial_infconv.json", 0},
    {"quadrivariate.json", 0},
    {"sandwich_hypothesis_fails.json", 2},
    {"sandwich_separator.json", 0},
    {"sublevel_automatic_interiority.json", 0},
    {"sublevel_duality.json", 0},
    {"sublevel_equivalence_empty.json", 0},
    {"sublevel_equivalence_shifted.json", 0},
    {"trivariate_boundedness.json", 0},
    {"trivariate_closed_subspace.json", 0},
};

std::string quote(const std::string& s)
{
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

// Runs a command, returning (exit code, stdout).
std::pair<int, std::string> capture(const std::string& cmd)
{
    std::string out;
    FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!p)
        return {-1, out};
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0)
        out.append(buf.data(), n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome cli_contract(const std::string& cli, const std::filesystem::path& dir)
{
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") {
            ++files;
            if (!corpus_exits.count(e.path().filename().string()))
                return {false, "undocumented corpus file " + e.path().filename().string()};
        }
    if (files < 10)
        return {false, "corpus has only " + std::to_string(files) + " files"};
    for (const auto& [name, want] : corpus_exits) {
        const std::string cmd = quote(cli) + " verify " + quote((dir / name).string()) + " --report json";
        auto [c1, o1] = capture(cmd);
        auto [c2, o2] = capture(cmd);
        if (c1 != want || c2 != want)
            return {false, name + ": exit " + std::to_string(c1) + "/" + std::to_string(c2) + ", documented " +
                               std::to_string(want)};
        if (o1 != o2)
            return {false, name + ": reports differ between runs"};
        if (o1.empty())
            return {false, name + ": empty report"};
    }
    return {true, std::to_string(files) + " files, two runs each, exit codes as documented, reports identical"};
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc != 3) {
        std::cerr << "usage: acceptance <sandwichkit CLI> <corpus directory>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const std::filesystem::path dir = argv[2];

    const std::vector<Criterion> criteria{
        {1, "biconjugation", 10, [] { return suite([](auto& r) { return props::biconjugation(r, 100, 20); }); }},
        {2, "sandwich soundness", 30, [] { return suite([](auto& r) { return props::sandwich_soundness(r, 100, 50); }); }},
        {3, "strong duality, boundedness", 60, [] { return suite([](auto& r) { return props::strong_fenchel(r, 50); }); }},
        {4, "strong duality, closed subspace", 60,
         [] { return suite([](auto& r) { return props::strong_trivariate(r, 50); }); }},
        {5, "weak duality", 60, [] { return suite([](auto& r) { return props::weak_duality(r, 50, 50); }); }},
        {6, "sublevel equivalence", 30, [] { return suite([](auto& r) { return props::theorem20(r, 100); }); }},
        {7, "reduction consistency", 30, [] { return suite([](auto& r) { return props::reductions(r, 20); }); }},
        {8, "worked examples", 5, [] { return from_suite(props::worked_examples()); }},
        {9, "oracle cross-check", 120, [] { return suite([](auto& r) { return props::oracle_crosscheck(r, 20); }); }},
        {10, "CLI contract", 30, [&] { return cli_contract(cli, dir); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = o.ok;
        if (secs > c.budget_s) {
            ok = false;
            o.detail += "; over the time budget";
        }
        if (!ok)
            ++failed;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs / %.0fs", secs, c.budget_s);
        std::cout << (ok ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " (" << timing << "): " << o.detail
                  << std::endl;
    }
    std::cout << (failed ? "FAILED " + std::to_string(failed) + " of 10" : std::string("ALL 10 PASSED")) << std::endl;
    return failed ? 1 : 0;
}
