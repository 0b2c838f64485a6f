#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "robinlab/config.hpp"
#include "robinlab/errors.hpp"

using namespace robinlab;
using nlohmann::json;

namespace {

json interval_config() {
    return json::parse(R"({"domain":{"interval":{"a":-1,"b":1,"n":50}},"coefficient":{"constant":1},
        "boundary_operator":{"type":"explicit_matrix","entries":[[-0.4,0.2],[0.2,-0.4]]},"seed":4,"output_dir":"out"})");
}

json disk_config() {
    return json::parse(R"({"domain":{"disk":{"n_r":3,"n_theta":16,"triangulation":"alternating"}},
        "coefficient":{"radial":"one_plus_r2"},
        "boundary_operator":{"type":"convolution","q_hat":{"0":-0.1,"2":0.25}},"seed":2,"output_dir":"o"})");
}

}  // namespace

TEST(Config, RoundTrip) {
    for (const json& j : {interval_config(), disk_config()}) {
        const ProblemConfig c = parse_config(j);
        const json back = config_to_json(c);
        EXPECT_EQ(config_to_json(parse_config(back)), back);
        EXPECT_EQ(config_hash(parse_config(back)), config_hash(c));
    }
}

TEST(Config, AllBoundaryTypesParse) {
    const char* ops[] = {
        R"({"type":"zero"})",
        R"({"type":"multiplication","beta":{"kind":"cos","k":2,"scale":0.5}})",
        R"({"type":"rank_one","v":{"kind":"cos","k":1}})",
        R"({"type":"kernel","kernel":{"kind":"gaussian","width":0.5,"scale":-1}})",
        R"({"type":"rotation_commutator","angle":1.5707963267948966})",
        R"({"type":"convolution","q_hat":{"0":-0.1}})",
    };
    for (const char* op : ops) {
        json j = disk_config();
        j["boundary_operator"] = json::parse(op);
        const ProblemConfig c = parse_config(j);
        EXPECT_EQ(config_to_json(parse_config(config_to_json(c))), config_to_json(c)) << op;
        EXPECT_NO_THROW(build_boundary_spec(c)) << op;
    }
}

TEST(Config, UnknownFieldsRejected) {
    json j = interval_config();
    j["colour"] = "blue";
    EXPECT_THROW(parse_config(j), InvalidArgument);
    j = interval_config();
    j["domain"]["interval"]["m"] = 3;
    EXPECT_THROW(parse_config(j), InvalidArgument);
    j = interval_config();
    j["boundary_operator"]["angle"] = 1.0;
    EXPECT_THROW(parse_config(j), InvalidArgument);
}

TEST(Config, BadValuesRejected) {
    json j = interval_config();
    j["boundary_operator"]["type"] = "fractional";
    EXPECT_THROW(parse_config(j), InvalidArgument);
    j = interval_config();
    j["domain"]["interval"]["n"] = "many";
    EXPECT_THROW(parse_config(j), InvalidArgument);
    j = interval_config();
    j["boundary_operator"]["entries"] = json::parse("[[1,2],[3]]");
    EXPECT_THROW(parse_config(j), InvalidArgument);
}

TEST(Config, HashChangesWithContent) {
    ProblemConfig a = parse_config(interval_config());
    ProblemConfig b = a;
    b.seed = 5;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, BuildsProblem) {
    const AssembledProblem pb = build_problem(parse_config(interval_config()));
    EXPECT_EQ(pb.size(), 51);
    EXPECT_NEAR(pb.form(0, 0) - pb.stiffness(0, 0), -0.4, 1e-13);
    const Mesh m = build_mesh(parse_config(disk_config()));
    ASSERT_TRUE(m.symmetry_tag);
    EXPECT_EQ(m.symmetry_tag->kind, SymmetryKind::Dihedral);
}

TEST(Config, MalformedFileIsConfigError) {
    const auto path = std::filesystem::temp_directory_path() / "robinlab_bad_config.json";
    std::ofstream(path) << "{\"domain\": ";
    EXPECT_THROW(load_config(path), InvalidArgument);
    EXPECT_THROW(load_config(path.string() + ".missing"), InvalidArgument);
    std::filesystem::remove(path);
}

TEST(DumpJson, FixedPrecisionAndSortedKeys) {
    const json j{{"b", 0.1}, {"a", 1}, {"c", std::nan("")}};
    const std::string s = dump_json(j);
    EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
    EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
    EXPECT_NE(s.find("null"), std::string::npos);
    EXPECT_EQ(dump_json(json::parse(s)), s);
}

TEST(WriteAtomic, CreatesDirectoriesAndLeavesNoTemp) {
    const auto dir = std::filesystem::temp_directory_path() / "robinlab_atomic" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    write_atomic(dir / "x.txt", "hello");
    std::ifstream in(dir / "x.txt");
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "hello");
    for (const auto& e : std::filesystem::directory_iterator(dir)) EXPECT_EQ(e.path().filename(), "x.txt");
    std::filesystem::remove_all(dir.parent_path());
}
