#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "textens/ensemble.hpp"
#include "textens/errors.hpp"

namespace textens {

// ---------------------------------------------------------------------------
// Single tagged container for every model kind. All integers and float bit
// patterns are written little-endian, so a saved model reloads bit-exactly.
// ---------------------------------------------------------------------------

struct KnnModel {
    KnnKnowledgeBase kb;
    KnnOptions options;
};

struct ModelArchive {
    static constexpr std::uint32_t kFormatVersion = 1;

    std::uint32_t format_version = kFormatVersion;
    Algo kind = Algo::ensemble;
    Vocabulary vocabulary;
    LabelSet label_set;
    std::vector<std::pair<std::string, std::string>> config_echo;
    std::uint64_t seed = 0;
    std::variant<NBModel, KnnModel, OvRModel, ForestModel, MLPModel, EnsembleModel> payload;
};

namespace archive_detail {

constexpr char kMagic[4] = {'T', 'X', 'A', 'R'};

class Writer {
public:
    explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError(path, "cannot open for writing");
    }

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void str(const std::string& s) {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    void f64s(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }

    void strs(const std::vector<std::string>& v) {
        u64(v.size());
        for (const auto& s : v) str(s);
    }

    void finish() {
        out_.flush();
        if (!out_) throw IoError(path_, "write failed");
    }

private:
    std::string path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw IoError(path, "cannot open for reading");
    }

    std::uint8_t u8() {
        int c = in_.get();
        if (c == EOF) throw ArchiveError("truncated file");
        return static_cast<std::uint8_t>(c);
    }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    std::string str() {
        std::uint64_t n = u64();
        if (n > (1ull << 32)) throw ArchiveError("implausible string length");
        std::string s(n, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(n));
        if (!in_) throw ArchiveError("truncated string");
        return s;
    }

    std::vector<double> f64s() {
        std::uint64_t n = u64();
        if (n > (1ull << 32)) throw ArchiveError("implausible array length");
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }

    std::vector<std::string> strs() {
        std::uint64_t n = u64();
        if (n > (1ull << 32)) throw ArchiveError("implausible array length");
        std::vector<std::string> v;
        v.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) v.push_back(str());
        return v;
    }

private:
    std::ifstream in_;
};

inline std::uint8_t kind_tag(Algo a) { return static_cast<std::uint8_t>(a); }

inline Algo tag_kind(std::uint8_t t) {
    if (t > static_cast<std::uint8_t>(Algo::ensemble))
        throw ArchiveError("unknown model kind tag");
    return static_cast<Algo>(t);
}

inline void write_feature_vector(Writer& w, const FeatureVector& fv) {
    w.u32(fv.dim);
    w.u64(fv.entries.size());
    for (const auto& [d, c] : fv.entries) {
        w.u32(d);
        w.u32(c);
    }
}

inline FeatureVector read_feature_vector(Reader& r) {
    FeatureVector fv;
    fv.dim = r.u32();
    std::uint64_t n = r.u64();
    fv.entries.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::uint32_t d = r.u32();
        std::uint32_t c = r.u32();
        fv.entries.emplace_back(d, c);
    }
    return fv;
}

inline void write_examples(Writer& w, const VectorizedCorpus& vc) {
    auto flat = vc.flatten();
    w.u64(flat.size());
    for (const auto& e : flat) {
        w.u64(e.label);
        write_feature_vector(w, e.features);
    }
}

inline std::vector<Example> read_examples(Reader& r) {
    std::uint64_t n = r.u64();
    std::vector<Example> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Example e;
        e.label = r.u64();
        e.features = read_feature_vector(r);
        out.push_back(std::move(e));
    }
    return out;
}

inline void write_nb(Writer& w, const NBModel& m) {
    w.f64(m.smoothing);
    w.u64(m.dim);
    w.f64s(m.log_priors);
    w.f64s(m.log_likelihoods);
}

inline NBModel read_nb(Reader& r, const LabelSet& labels) {
    NBModel m;
    m.smoothing = r.f64();
    m.dim = r.u64();
    m.log_priors = r.f64s();
    m.log_likelihoods = r.f64s();
    m.label_set = labels;
    if (m.log_priors.size() != labels.size() ||
        m.log_likelihoods.size() != labels.size() * m.dim)
        throw ArchiveError("naive bayes payload is inconsistent");
    return m;
}

inline void write_knn(Writer& w, const KnnModel& m) {
    w.u64(m.options.k);
    w.u8(static_cast<std::uint8_t>(m.options.metric));
    w.u64(m.kb.dim);
    write_examples(w, m.kb.instances);
}

inline KnnModel read_knn(Reader& r, const LabelSet& labels, std::size_t partitions) {
    KnnModel m;
    m.options.k = r.u64();
    std::uint8_t metric_tag = r.u8();
    if (metric_tag > static_cast<std::uint8_t>(DistanceMetric::cosine))
        throw ArchiveError("unknown metric tag");
    m.options.metric = static_cast<DistanceMetric>(metric_tag);
    std::size_t dim = r.u64();
    auto examples = read_examples(r);
    m.kb = build_knn(partition(std::move(examples), partitions), labels);
    if (m.kb.dim != dim) throw ArchiveError("knn payload is inconsistent");
    return m;
}

inline void write_ovr(Writer& w, const OvRModel& m) {
    w.u64(m.per_class.size());
    for (const auto& h : m.per_class) {
        w.f64s(h.w);
        w.f64(h.b);
    }
}

inline OvRModel read_ovr(Reader& r, const LabelSet& labels) {
    OvRModel m;
    std::uint64_t n = r.u64();
    if (n != labels.size()) throw ArchiveError("one-vs-rest payload is inconsistent");
    m.per_class.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        HyperplaneModel h;
        h.w = r.f64s();
        h.b = r.f64();
        m.per_class.push_back(std::move(h));
    }
    m.label_set = labels;
    return m;
}

inline void write_rf(Writer& w, const ForestModel& m) {
    w.u64(m.feature_subset);
    w.u64(m.max_depth);
    w.u64(m.dim);
    w.u64(m.seed);
    w.u64(m.trees.size());
    for (const auto& tree : m.trees) {
        w.u64(tree.nodes.size());
        for (const auto& node : tree.nodes) {
            w.u8(node.leaf ? 1 : 0);
            w.u32(node.cls);
            w.u32(node.feature);
            w.f64(node.threshold);
            w.u32(static_cast<std::uint32_t>(node.left));
            w.u32(static_cast<std::uint32_t>(node.right));
        }
    }
}

inline ForestModel read_rf(Reader& r, const LabelSet& labels) {
    ForestModel m;
    m.feature_subset = r.u64();
    m.max_depth = r.u64();
    m.dim = r.u64();
    m.seed = r.u64();
    std::uint64_t n_trees = r.u64();
    m.trees.reserve(n_trees);
    for (std::uint64_t t = 0; t < n_trees; ++t) {
        DecisionTree tree;
        std::uint64_t n_nodes = r.u64();
        tree.nodes.reserve(n_nodes);
        for (std::uint64_t i = 0; i < n_nodes; ++i) {
            TreeNode node;
            node.leaf = r.u8() != 0;
            node.cls = r.u32();
            node.feature = r.u32();
            node.threshold = r.f64();
            node.left = static_cast<std::int32_t>(r.u32());
            node.right = static_cast<std::int32_t>(r.u32());
            tree.nodes.push_back(node);
        }
        m.trees.push_back(std::move(tree));
    }
    m.label_set = labels;
    return m;
}

inline void write_mlp(Writer& w, const MLPModel& m) {
    w.u64(m.dim);
    w.u64(m.units);
    w.u64(m.n_classes);
    w.u64(m.seed);
    w.f64s(m.params);
}

inline MLPModel read_mlp(Reader& r, const LabelSet& labels) {
    MLPModel m;
    m.dim = r.u64();
    m.units = r.u64();
    m.n_classes = r.u64();
    m.seed = r.u64();
    m.params = r.f64s();
    if (m.n_classes != labels.size() || m.params.size() != m.param_count())
        throw ArchiveError("mlp payload is inconsistent");
    return m;
}

}  // namespace archive_detail

inline void save_archive(const ModelArchive& archive, const std::string& path) {
    using namespace archive_detail;
    Writer w(path);
    w.u8(kMagic[0]);
    w.u8(kMagic[1]);
    w.u8(kMagic[2]);
    w.u8(kMagic[3]);
    w.u32(archive.format_version);
    w.u8(kind_tag(archive.kind));
    w.strs(archive.vocabulary.terms());
    w.strs(archive.label_set.labels());
    w.u64(archive.config_echo.size());
    for (const auto& [k, v] : archive.config_echo) {
        w.str(k);
        w.str(v);
    }
    w.u64(archive.seed);

    switch (archive.kind) {
        case Algo::nb:
            write_nb(w, std::get<NBModel>(archive.payload));
            break;
        case Algo::knn:
            write_knn(w, std::get<KnnModel>(archive.payload));
            break;
        case Algo::svm:
            write_ovr(w, std::get<OvRModel>(archive.payload));
            break;
        case Algo::rf:
            write_rf(w, std::get<ForestModel>(archive.payload));
            break;
        case Algo::mlp:
            write_mlp(w, std::get<MLPModel>(archive.payload));
            break;
        case Algo::ensemble: {
            const auto& e = std::get<EnsembleModel>(archive.payload);
            write_nb(w, e.nb);
            write_knn(w, KnnModel{e.knn, e.knn_options});
            write_ovr(w, e.svm);
            write_rf(w, e.rf);
            write_mlp(w, e.dnn);
            break;
        }
    }
    w.finish();
}

// `partitions` controls how a loaded knowledge base is re-partitioned; KNN
// predictions do not depend on it.
inline ModelArchive load_archive(const std::string& path, std::size_t partitions = 4) {
    using namespace archive_detail;
    Reader r(path);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0) throw ArchiveError("bad magic");
    ModelArchive archive;
    archive.format_version = r.u32();
    if (archive.format_version != ModelArchive::kFormatVersion)
        throw ArchiveError("unsupported format version " +
                           std::to_string(archive.format_version));
    archive.kind = tag_kind(r.u8());
    archive.vocabulary = Vocabulary(r.strs());
    archive.label_set = LabelSet(r.strs());
    std::uint64_t n_cfg = r.u64();
    for (std::uint64_t i = 0; i < n_cfg; ++i) {
        std::string k = r.str();
        std::string v = r.str();
        archive.config_echo.emplace_back(std::move(k), std::move(v));
    }
    archive.seed = r.u64();

    const LabelSet& labels = archive.label_set;
    switch (archive.kind) {
        case Algo::nb:
            archive.payload = read_nb(r, labels);
            break;
        case Algo::knn:
            archive.payload = read_knn(r, labels, partitions);
            break;
        case Algo::svm:
            archive.payload = read_ovr(r, labels);
            break;
        case Algo::rf:
            archive.payload = read_rf(r, labels);
            break;
        case Algo::mlp:
            archive.payload = read_mlp(r, labels);
            break;
        case Algo::ensemble: {
            EnsembleModel e;
            e.nb = read_nb(r, labels);
            KnnModel knn = read_knn(r, labels, partitions);
            e.knn = std::move(knn.kb);
            e.knn_options = knn.options;
            e.svm = read_ovr(r, labels);
            e.rf = read_rf(r, labels);
            e.dnn = read_mlp(r, labels);
            e.label_set = labels;
            e.vocabulary = archive.vocabulary;
            archive.payload = std::move(e);
            break;
        }
    }
    return archive;
}

// Feature scorer for whatever the archive holds (KNN zero-vector fallback
// included, as in the ensemble layer).
inline FeatureScorer archive_scorer(const ModelArchive& archive) {
    switch (archive.kind) {
        case Algo::nb: {
            auto m = std::make_shared<NBModel>(std::get<NBModel>(archive.payload));
            return [m](const FeatureVector& x) { return predict_nb(*m, x); };
        }
        case Algo::knn: {
            auto m = std::make_shared<KnnModel>(std::get<KnnModel>(archive.payload));
            return [m](const FeatureVector& x) {
                return knn_score_or_uniform(m->kb, x, m->options);
            };
        }
        case Algo::svm: {
            auto m = std::make_shared<OvRModel>(std::get<OvRModel>(archive.payload));
            return [m](const FeatureVector& x) { return predict_ovr(*m, x); };
        }
        case Algo::rf: {
            auto m = std::make_shared<ForestModel>(std::get<ForestModel>(archive.payload));
            return [m](const FeatureVector& x) { return predict_rf(*m, x); };
        }
        case Algo::mlp: {
            auto m = std::make_shared<MLPModel>(std::get<MLPModel>(archive.payload));
            return [m](const FeatureVector& x) { return mlp_forward(*m, x); };
        }
        case Algo::ensemble: {
            auto m = std::make_shared<EnsembleModel>(std::get<EnsembleModel>(archive.payload));
            return [m](const FeatureVector& x) {
                std::vector<ClassProbabilities> five{
                    predict_nb(m->nb, x), knn_score_or_uniform(m->knn, x, m->knn_options),
                    predict_ovr(m->svm, x), predict_rf(m->rf, x), mlp_forward(m->dnn, x)};
                return ensemble_average(five);
            };
        }
    }
    throw ArchiveError("unreachable kind");
}

}  // namespace textens
