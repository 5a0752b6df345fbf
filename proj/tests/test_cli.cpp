#include "doctest.h"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

fs::path workdir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("billiard_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Result billiard(const std::string& args) {
    const char* exe = std::getenv("BILLIARD_EXE");
    REQUIRE_MESSAGE(exe != nullptr, "BILLIARD_EXE is not set");
    const std::string cmd = "cd '" + workdir().string() + "' && '" + exe + "' " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

void write(const std::string& name, const std::string& text) {
    std::ofstream(workdir() / name) << text;
}

const char* gaps_11 = R"({"ZB0":"1/2","ZC0":"1/2","GB":["2/3"],"GC":["1"],"rho":"3/2"})";

} // namespace

TEST_CASE("bounds") {
    Result r = billiard("bounds --n 6");
    CHECK(r.status == 0);
    CHECK(r.out.find("f=15") != std::string::npos);
    CHECK(r.out.find("equal") != std::string::npos);
    r = billiard("bounds --n 7");
    CHECK(r.out.find("f=23") != std::string::npos);
    CHECK(r.out.find("greater") != std::string::npos);
    r = billiard("bounds --n 3");
    CHECK(r.out.find("K(3,2)=4") != std::string::npos);
    CHECK(billiard("bounds --n 2").status == 2);
}

TEST_CASE("verify the 1-D construction") {
    const Result r = billiard("verify --kind oned --n 10");
    CHECK(r.status == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    std::ifstream in(workdir() / "verify-oned.manifest.json");
    REQUIRE(in);
    const json man = json::parse(in);
    CHECK(man.at("exit_status") == 0);
    CHECK(man.at("command") == "verify");
    CHECK(man.at("counts").at("observed_total") == 45);
}

TEST_CASE("Foch scene through construct and simulate") {
    REQUIRE(billiard("construct --kind foch --out foch.json").status == 0);
    const Result r = billiard("simulate foch.json --svg foch.svg");
    CHECK(r.status == 0);
    CHECK(r.out.find("proper=3") != std::string::npos);
    // the far excursion of P1 is listed rather than squeezed into the view
    std::ifstream svg(workdir() / "foch.svg");
    const std::string text((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
    CHECK(text.find("outside view") != std::string::npos);
    const Result again = billiard("simulate foch.json --svg foch2.svg");
    std::ifstream svg2(workdir() / "foch2.svg");
    const std::string text2((std::istreambuf_iterator<char>(svg2)), std::istreambuf_iterator<char>());
    CHECK(text == text2);
}

TEST_CASE("construct then simulate") {
    Result r = billiard("construct --kind oned --n 6 --out oned6.json");
    REQUIRE(r.status == 0);
    CHECK(fs::exists(workdir() / "oned6.json.manifest.json"));
    r = billiard("simulate oned6.json --out events.jsonl --svg oned6.svg --csv oned6.csv");
    CHECK(r.status == 0);
    CHECK(r.out.find("proper=15") != std::string::npos);
    std::ifstream svg(workdir() / "oned6.svg");
    std::string head;
    std::getline(svg, head);
    CHECK(head.find("<svg") != std::string::npos);
    std::ifstream csv(workdir() / "oned6.csv");
    std::getline(csv, head);
    CHECK(head == "time,id,cx,cy,vx,vy");
}

TEST_CASE("limit and converge on a gap file") {
    write("g11.json", gaps_11);
    Result r = billiard("limit g11.json --m 1 --n1 1 --report limit.json");
    CHECK(r.status == 0);
    std::ifstream in(workdir() / "limit.json");
    REQUIRE(in);
    const json rep = json::parse(in);
    CHECK(rep.dump().find("16/9") != std::string::npos);
    r = billiard("converge g11.json --eps 1e-2,1e-3 --out conv.csv");
    CHECK(r.status == 0);
    std::ifstream csv(workdir() / "conv.csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("input errors exit with 2") {
    write("bad.json", R"({"ZB0":"1/2","ZC0":"1/2","GB":["9/10"],"GC":["1"],"rho":"3/2"})");
    CHECK(billiard("limit bad.json").status == 2);
    CHECK(billiard("simulate missing.json").status == 2);
    write("broken.json", "{ not json");
    CHECK(billiard("simulate broken.json").status == 2);
    CHECK(billiard("construct --kind nonsense --n 3 --out x.json").status == 2);
}

TEST_CASE("touching chain exits with 3") {
    write("chain.json", R"({"balls":[
        {"id":"P1","center":["-1","0"],"velocity":["1","0"]},
        {"id":"P2","center":["2","0"],"velocity":["0","0"]},
        {"id":"P3","center":["4","0"],"velocity":["0","0"]}]})");
    CHECK(billiard("simulate chain.json").status == 3);
}
