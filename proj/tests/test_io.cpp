#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "pcsqcnn/io.hpp"

using namespace pcsqcnn;

TEST_SUITE_BEGIN("io");

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "pcsqcnn_io_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

Checkpoint sample_checkpoint() {
    Checkpoint ck;
    ck.layout = build_layout(2, 2, 1);
    ck.encoder = EncoderConfig{0.0, std::numbers::pi, 1};
    ck.mode = PipelineMode::ReducedJunction;
    ck.basis = BasisKind::Fourier;
    ck.seed = 1234567890123ULL;
    LayerStack stack = make_stack(ck.layout, ck.mode, ck.basis);
    rng::Stream ps(5, "params");
    stack.params = random_params(ck.layout, ps);
    ck.theta = stack.params.theta;
    rng::Stream hs(6, "head");
    ck.head = init_head(static_cast<int>(ck.layout.readout_dim()), 10, hs);
    return ck;
}

}  // namespace

TEST_CASE("document round trip keeps doubles bitwise") {
    Document doc;
    doc.set("model.name", "demo");
    doc.set_double("model.x", 0.1 + 0.2);
    doc.set_double("model.tiny", 5e-324);
    doc.set_doubles("model.arr", {1.0 / 3.0, -2.7182818284590452, 1e308});
    const std::string path = (temp_dir() / "doc.txt").string();
    doc.save(path, "test document");
    const Document back = Document::load(path);
    CHECK(back.get("model.name") == "demo");
    CHECK(back.get_double("model.x") == 0.1 + 0.2);
    CHECK(back.get_double("model.tiny") == 5e-324);
    const std::vector<double> arr = back.get_doubles("model.arr");
    REQUIRE(arr.size() == 3);
    CHECK(arr[0] == 1.0 / 3.0);
    CHECK(arr[1] == -2.7182818284590452);
    CHECK(arr[2] == 1e308);
}

TEST_CASE("document parses sections, comments, and the pi literal") {
    const std::string path = (temp_dir() / "cfg.txt").string();
    std::ofstream out(path);
    out << "# a config\n[encoder]\na = 0\nb = pi  # upper endpoint\n[model]\nn_idx = 4\n";
    out.close();
    const Document doc = Document::load(path);
    CHECK(doc.get_double("encoder.b") == std::numbers::pi);
    CHECK(doc.get_int("model.n_idx") == 4);
    CHECK_THROWS_AS(doc.get("model.missing"), IoError);
}

TEST_CASE("checkpoint text round trip is bitwise") {
    const Checkpoint ck = sample_checkpoint();
    const std::string path = (temp_dir() / "ck.txt").string();
    save_checkpoint(ck, path);
    const Checkpoint back = load_checkpoint(path);
    CHECK(back.theta == ck.theta);
    CHECK(back.head.w == ck.head.w);
    CHECK(back.head.b == ck.head.b);
    CHECK(back.seed == ck.seed);
    CHECK(back.layout.n_idx == ck.layout.n_idx);
    CHECK(back.encoder.b == ck.encoder.b);

    const LayerStack stack = stack_from_checkpoint(back);
    CHECK(stack.params.theta == ck.theta);
}

TEST_CASE("checkpoint sidecar round trip is bitwise") {
    const Checkpoint ck = sample_checkpoint();
    const std::string path = (temp_dir() / "ck_bin.txt").string();
    save_checkpoint(ck, path, /*binary_sidecar=*/true);
    CHECK(std::filesystem::exists(path + ".bin"));
    const Checkpoint back = load_checkpoint(path);
    CHECK(back.theta == ck.theta);
    CHECK(back.head.w == ck.head.w);
    CHECK(back.head.b == ck.head.b);
}

TEST_CASE("metrics files are append-only with one header") {
    const std::string path = (temp_dir() / "metrics.tsv").string();
    std::filesystem::remove(path);
    {
        MetricsWriter w(path, "run-a");
        w.row(1, "train", 2.302585, 0.1);
        w.row(1, "test", 2.171, 0.2, "128");
    }
    {
        MetricsWriter w(path, "run-a");
        w.row(2, "train", 1.9, 0.3);
    }
    std::ifstream in(path);
    std::string line;
    int lines = 0, headers = 0;
    while (std::getline(in, line)) {
        ++lines;
        if (line.rfind("# pcsqcnn-metrics", 0) == 0) ++headers;
    }
    CHECK(lines == 5);  // banner + column header + 3 rows
    CHECK(headers == 1);
}

TEST_SUITE_END();
