#pragma once

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcsqcnn/encoding.hpp"
#include "pcsqcnn/head.hpp"
#include "pcsqcnn/layers.hpp"

namespace pcsqcnn {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Plain structured-text documents: "[section]" headers and "key = value"
// lines, '#' comments. Used for configs and checkpoints alike.

class Document {
  public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    void set_double(const std::string& key, double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        kv_[key] = buf;
    }

    void set_int(const std::string& key, std::int64_t v) { kv_[key] = std::to_string(v); }
    void set_u64(const std::string& key, std::uint64_t v) { kv_[key] = std::to_string(v); }

    void set_doubles(const std::string& key, const std::vector<double>& vals) {
        std::string s;
        s.reserve(vals.size() * 20);
        char buf[40];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            if (i) s.push_back(' ');
            s += buf;
        }
        kv_[key] = std::move(s);
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    const std::string& get(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw IoError("missing key: " + key);
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    std::int64_t get_int(const std::string& key) const {
        return std::stoll(get(key));
    }

    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const {
        return has(key) ? get_int(key) : fallback;
    }

    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? std::stoull(get(key)) : fallback;
    }

    double get_double(const std::string& key) const {
        const std::string& v = get(key);
        if (v == "pi") return std::numbers::pi;
        return std::strtod(v.c_str(), nullptr);
    }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    std::vector<double> get_doubles(const std::string& key) const {
        const std::string& v = get(key);
        std::vector<double> out;
        const char* p = v.c_str();
        char* end = nullptr;
        while (*p) {
            const double x = std::strtod(p, &end);
            if (end == p) break;
            out.push_back(x);
            p = end;
        }
        return out;
    }

    const std::map<std::string, std::string>& items() const { return kv_; }

    void save(const std::string& path, const std::string& banner) const {
        std::ofstream out(path);
        if (!out) throw IoError(path + ": cannot open for writing");
        out << "# " << banner << "\n";
        std::string section;
        for (const auto& [key, value] : kv_) {
            const std::size_t dot = key.find('.');
            const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
            const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
            if (sec != section) {
                out << "[" << sec << "]\n";
                section = sec;
            }
            out << name << " = " << value << "\n";
        }
        if (!out) throw IoError(path + ": write failed");
    }

    static Document load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError(path + ": cannot open");
        Document doc;
        std::string line, section;
        while (std::getline(in, line)) {
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto trim = [](std::string s) {
                const std::size_t b = s.find_first_not_of(" \t\r");
                if (b == std::string::npos) return std::string();
                const std::size_t e = s.find_last_not_of(" \t\r");
                return s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw IoError(path + ": malformed line: " + line);
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            doc.set(section.empty() ? key : section + "." + key, value);
        }
        return doc;
    }

  private:
    std::map<std::string, std::string> kv_;
};

// ---------------------------------------------------------------------------
// Checkpoints: layout, encoder, stack flags, quantum coefficients, head,
// and the RNG seed record. Decimal text (%.17g round-trips doubles
// exactly); an optional raw-double sidecar holds the arrays for speed.

struct Checkpoint {
    RegisterLayout layout;
    EncoderConfig encoder;
    PipelineMode mode = PipelineMode::ReducedJunction;
    BasisKind basis = BasisKind::Fourier;
    std::uint64_t rbc_seed = 0;
    std::vector<double> theta;
    HeadParams head;
    std::uint64_t seed = 0;
};

namespace detail {

inline void write_sidecar(const std::string& path, const std::vector<double>& all) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    const char magic[8] = {'p', 'c', 's', 'q', 'b', 'i', 'n', '1'};
    out.write(magic, 8);
    const std::uint64_t n = all.size();
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(all.data()),
              static_cast<std::streamsize>(all.size() * sizeof(double)));
    if (!out) throw IoError(path + ": write failed");
}

inline std::vector<double> read_sidecar(const std::string& path, std::size_t expected) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "pcsqbin1") throw IoError(path + ": bad sidecar magic");
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in || n != expected) throw IoError(path + ": sidecar length mismatch");
    std::vector<double> out(n);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw IoError(path + ": sidecar truncated");
    return out;
}

}  // namespace detail

inline void save_checkpoint(const Checkpoint& ck, const std::string& path,
                            bool binary_sidecar = false) {
    Document doc;
    doc.set_int("format.version", 1);
    doc.set_int("layout.n_idx", ck.layout.n_idx);
    doc.set_int("layout.q", ck.layout.Q);
    doc.set_int("layout.n_f", ck.layout.n_f);
    doc.set_double("encoder.a", ck.encoder.a);
    doc.set_double("encoder.b", ck.encoder.b);
    doc.set("stack.mode", ck.mode == PipelineMode::ReducedJunction ? "reduced" : "explicit");
    doc.set("stack.basis", ck.basis == BasisKind::Fourier ? "fourier" : "random");
    doc.set_u64("stack.rbc_seed", ck.rbc_seed);
    doc.set_u64("rng.seed", ck.seed);
    doc.set_int("quantum.count", static_cast<std::int64_t>(ck.theta.size()));
    // coefficient layout stamps; heads are only portable across readers
    // that agree on these orders
    doc.set("quantum.order", "layer,branch,mode,pauli");
    doc.set("head.readout_order", "x,y,feature");
    doc.set_int("head.classes", ck.head.classes);
    doc.set_int("head.dim", ck.head.dim);
    if (binary_sidecar) {
        std::vector<double> all;
        all.reserve(ck.theta.size() + ck.head.w.size() + ck.head.b.size());
        all.insert(all.end(), ck.theta.begin(), ck.theta.end());
        all.insert(all.end(), ck.head.w.begin(), ck.head.w.end());
        all.insert(all.end(), ck.head.b.begin(), ck.head.b.end());
        const std::string sidecar = std::filesystem::path(path).filename().string() + ".bin";
        detail::write_sidecar(path + ".bin", all);
        doc.set("quantum.sidecar", sidecar);
    } else {
        doc.set_doubles("quantum.theta", ck.theta);
        doc.set_doubles("head.w", ck.head.w);
        doc.set_doubles("head.b", ck.head.b);
    }
    doc.save(path, "pcsqcnn checkpoint");
}

inline Checkpoint load_checkpoint(const std::string& path) {
    const Document doc = Document::load(path);
    if (doc.get_int("format.version") != 1) throw IoError(path + ": unsupported format version");
    Checkpoint ck;
    ck.layout = build_layout(static_cast<int>(doc.get_int("layout.n_idx")),
                             static_cast<int>(doc.get_int("layout.q")),
                             static_cast<int>(doc.get_int("layout.n_f")));
    ck.encoder.a = doc.get_double("encoder.a");
    ck.encoder.b = doc.get_double("encoder.b");
    ck.encoder.n_f = ck.layout.n_f;
    ck.mode = doc.get("stack.mode") == "reduced" ? PipelineMode::ReducedJunction
                                                 : PipelineMode::ExplicitPooling;
    ck.basis = doc.get("stack.basis") == "fourier" ? BasisKind::Fourier : BasisKind::Random;
    ck.rbc_seed = doc.get_u64_or("stack.rbc_seed", 0);
    ck.seed = doc.get_u64_or("rng.seed", 0);
    const std::size_t n_theta = static_cast<std::size_t>(doc.get_int("quantum.count"));
    ck.head.classes = static_cast<int>(doc.get_int("head.classes"));
    ck.head.dim = static_cast<int>(doc.get_int("head.dim"));
    const std::size_t n_w = static_cast<std::size_t>(ck.head.classes) *
                            static_cast<std::size_t>(ck.head.dim);
    const std::size_t n_b = static_cast<std::size_t>(ck.head.classes);
    if (doc.has("quantum.sidecar")) {
        const std::string sidecar =
            (std::filesystem::path(path).parent_path() / doc.get("quantum.sidecar")).string();
        const std::vector<double> all = detail::read_sidecar(sidecar, n_theta + n_w + n_b);
        ck.theta.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_theta));
        ck.head.w.assign(all.begin() + static_cast<std::ptrdiff_t>(n_theta),
                         all.begin() + static_cast<std::ptrdiff_t>(n_theta + n_w));
        ck.head.b.assign(all.begin() + static_cast<std::ptrdiff_t>(n_theta + n_w), all.end());
    } else {
        ck.theta = doc.get_doubles("quantum.theta");
        ck.head.w = doc.get_doubles("head.w");
        ck.head.b = doc.get_doubles("head.b");
    }
    if (ck.theta.size() != n_theta || ck.head.w.size() != n_w || ck.head.b.size() != n_b) {
        throw IoError(path + ": array lengths do not match the declared counts");
    }
    return ck;
}

inline LayerStack stack_from_checkpoint(const Checkpoint& ck) {
    LayerStack stack = make_stack(ck.layout, ck.mode, ck.basis, ck.rbc_seed);
    if (static_cast<std::int64_t>(ck.theta.size()) != stack.params.total()) {
        throw IoError("checkpoint: quantum coefficient count does not match the layout");
    }
    stack.params.theta = ck.theta;
    return stack;
}

// ---------------------------------------------------------------------------
// Metrics: append-only TSV rows, schema-stamped, deterministic content.

class MetricsWriter {
  public:
    MetricsWriter(const std::string& path, const std::string& run_id)
        : path_(path), run_id_(run_id) {
        const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
        out_.open(path, std::ios::app);
        if (!out_) throw IoError(path + ": cannot open for appending");
        if (fresh) {
            out_ << "# pcsqcnn-metrics schema_version=1\n";
            out_ << "run_id\tepoch\tsplit\tloss\taccuracy\tshots\textra\n";
        }
    }

    void row(std::int64_t epoch, const std::string& split, double loss, double accuracy,
             const std::string& shots = "exact", const std::string& extra = "") {
        char lbuf[40], abuf[40];
        std::snprintf(lbuf, sizeof lbuf, "%.17g", loss);
        std::snprintf(abuf, sizeof abuf, "%.17g", accuracy);
        out_ << run_id_ << "\t" << epoch << "\t" << split << "\t" << lbuf << "\t" << abuf << "\t"
             << shots << "\t" << extra << "\n";
        out_.flush();
        if (!out_) throw IoError(path_ + ": write failed");
    }

  private:
    std::string path_;
    std::string run_id_;
    std::ofstream out_;
};

}  // namespace pcsqcnn
