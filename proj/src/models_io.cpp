#include <cstring>
#include <fstream>

#include "barriers/models.hpp"

namespace barriers {

namespace {

constexpr char kMagic[8] = {'B', 'A', 'R', 'R', 'M', 'D', 'L', '1'};

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot write model file: " + path);
    }

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void i32(std::int32_t v) { bytes(&v, 4); }
    void f64(double v) { bytes(&v, 8); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void doubles(const std::vector<double>& v) {
        u64(v.size());
        bytes(v.data(), v.size() * sizeof(double));
    }
    void sizes(const std::vector<std::size_t>& v) {
        u64(v.size());
        for (std::size_t x : v) u64(x);
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open model file: " + path);
    }

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            throw ValidationError("truncated model file");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return v;
    }
    std::int32_t i32() {
        std::int32_t v;
        bytes(&v, 4);
        return v;
    }
    double f64() {
        double v;
        bytes(&v, 8);
        return v;
    }
    std::string str() {
        std::string s(u64(), '\0');
        bytes(s.data(), s.size());
        return s;
    }
    std::vector<double> doubles() {
        std::vector<double> v(u64());
        bytes(v.data(), v.size() * sizeof(double));
        return v;
    }
    std::vector<std::size_t> sizes() {
        std::vector<std::size_t> v(u64());
        for (std::size_t& x : v) x = u64();
        return v;
    }

private:
    std::ifstream in_;
};

void write_sparse_rows(Writer& w, const std::vector<SparseVector>& rows) {
    w.u64(rows.size());
    for (const SparseVector& row : rows) {
        w.u64(row.size());
        for (const SparseEntry& e : row) {
            w.u64(e.index);
            w.f64(e.value);
        }
    }
}

std::vector<SparseVector> read_sparse_rows(Reader& r) {
    std::vector<SparseVector> rows(r.u64());
    for (SparseVector& row : rows) {
        row.resize(r.u64());
        for (SparseEntry& e : row) {
            e.index = r.u64();
            e.value = r.f64();
        }
    }
    return rows;
}

} // namespace

void save_model(const TrainedModel& model, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(static_cast<std::uint32_t>(model.kind));

    w.u64(model.meta.seed);
    w.i32(model.meta.epochs_run);
    w.f64(model.meta.final_loss);
    w.doubles(model.meta.epoch_losses);
    w.str(model.meta.notes);

    w.u64(model.class_names.size());
    for (const std::string& name : model.class_names) w.str(name);

    switch (model.kind) {
    case ModelKind::logreg:
    case ModelKind::linear_svc: {
        const auto& m = std::get<LinearModel>(model.params);
        w.u64(m.n_features);
        w.u64(m.n_classes);
        w.u8(m.softmax ? 1 : 0);
        w.doubles(m.weights);
        w.doubles(m.bias);
        break;
    }
    case ModelKind::naive_bayes: {
        const auto& m = std::get<NaiveBayesModel>(model.params);
        w.u64(m.n_features);
        w.u64(m.n_classes);
        w.doubles(m.log_prior);
        w.doubles(m.log_likelihood);
        break;
    }
    case ModelKind::knn: {
        const auto& m = std::get<KnnModel>(model.params);
        w.u64(m.n_features);
        w.u64(m.n_classes);
        w.i32(m.k);
        write_sparse_rows(w, m.rows);
        w.sizes(m.labels);
        w.doubles(m.norms);
        break;
    }
    case ModelKind::decision_tree: {
        const auto& m = std::get<TreeModel>(model.params);
        w.u64(m.n_features);
        w.u64(m.n_classes);
        w.u64(m.nodes.size());
        for (const TreeNode& node : m.nodes) {
            w.u8(node.leaf ? 1 : 0);
            w.u64(node.feature);
            w.f64(node.threshold);
            w.i32(node.left);
            w.i32(node.right);
            w.u64(node.label);
        }
        break;
    }
    case ModelKind::mlp: {
        const auto& m = std::get<MlpModel>(model.params);
        w.u64(m.n_features);
        w.u64(m.n_classes);
        w.i32(m.hidden_layers);
        w.i32(m.hidden_units);
        w.u8(m.sigmoid_output ? 1 : 0);
        w.u64(m.weights.size());
        for (const auto& layer : m.weights) w.doubles(layer);
        w.u64(m.biases.size());
        for (const auto& layer : m.biases) w.doubles(layer);
        break;
    }
    }
}

TrainedModel load_model(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ValidationError("not a model file: " + path);

    TrainedModel model;
    model.kind = static_cast<ModelKind>(r.u32());
    model.meta.seed = r.u64();
    model.meta.epochs_run = r.i32();
    model.meta.final_loss = r.f64();
    model.meta.epoch_losses = r.doubles();
    model.meta.notes = r.str();

    model.class_names.resize(r.u64());
    for (std::string& name : model.class_names) name = r.str();

    switch (model.kind) {
    case ModelKind::logreg:
    case ModelKind::linear_svc: {
        LinearModel m;
        m.n_features = r.u64();
        m.n_classes = r.u64();
        m.softmax = r.u8() != 0;
        m.weights = r.doubles();
        m.bias = r.doubles();
        model.params = std::move(m);
        break;
    }
    case ModelKind::naive_bayes: {
        NaiveBayesModel m;
        m.n_features = r.u64();
        m.n_classes = r.u64();
        m.log_prior = r.doubles();
        m.log_likelihood = r.doubles();
        model.params = std::move(m);
        break;
    }
    case ModelKind::knn: {
        KnnModel m;
        m.n_features = r.u64();
        m.n_classes = r.u64();
        m.k = r.i32();
        m.rows = read_sparse_rows(r);
        m.labels = r.sizes();
        m.norms = r.doubles();
        model.params = std::move(m);
        break;
    }
    case ModelKind::decision_tree: {
        TreeModel m;
        m.n_features = r.u64();
        m.n_classes = r.u64();
        m.nodes.resize(r.u64());
        for (TreeNode& node : m.nodes) {
            node.leaf = r.u8() != 0;
            node.feature = r.u64();
            node.threshold = r.f64();
            node.left = r.i32();
            node.right = r.i32();
            node.label = r.u64();
        }
        model.params = std::move(m);
        break;
    }
    case ModelKind::mlp: {
        MlpModel m;
        m.n_features = r.u64();
        m.n_classes = r.u64();
        m.hidden_layers = r.i32();
        m.hidden_units = r.i32();
        m.sigmoid_output = r.u8() != 0;
        m.weights.resize(r.u64());
        for (auto& layer : m.weights) layer = r.doubles();
        m.biases.resize(r.u64());
        for (auto& layer : m.biases) layer = r.doubles();
        model.params = std::move(m);
        break;
    }
    default: throw ValidationError("unknown model kind in file: " + path);
    }
    return model;
}

} // namespace barriers
