// Command-line front end: train, predict, evaluate, score tables, and
// synthetic corpus generation over the textens library.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "textens/textens.hpp"

namespace {

using namespace textens;

struct CommonFlags {
    std::uint64_t seed = 42;
    std::size_t partitions = 4;
    std::size_t threads = 0;  // 0 = hardware default
    std::string algo = "ensemble";
    double alpha = 1.0;
    std::size_t k = 1;
    std::string metric = "cosine";
    double reg_lambda = 1e-3;
    double lr = 0.1;
    std::size_t iters = 200;
    std::size_t trees = 100;
    std::size_t depth = 16;
    std::size_t units = 128;
    std::size_t batch = 32;
    std::size_t epochs = 1;
    std::size_t workers = 1;
    std::size_t avg_freq = 5;
};

void add_hyper_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--algo", f.algo, "algorithm: nb|knn|svm|rf|mlp|ensemble");
    cmd->add_option("--seed", f.seed, "master random seed");
    cmd->add_option("--partitions", f.partitions, "dataset partition count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", f.threads, "worker pool size (0 = hardware)");
    cmd->add_option("--alpha", f.alpha, "naive bayes smoothing");
    cmd->add_option("--k", f.k, "knn neighbour count")->check(CLI::PositiveNumber);
    cmd->add_option("--metric", f.metric,
                    "knn metric: euclidean|manhattan|chebyshev|hamming|cosine");
    cmd->add_option("--lambda", f.reg_lambda, "svm L2 coefficient");
    cmd->add_option("--lr", f.lr, "svm learning rate");
    cmd->add_option("--iters", f.iters, "svm iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--trees", f.trees, "forest size")->check(CLI::PositiveNumber);
    cmd->add_option("--depth", f.depth, "tree depth limit")->check(CLI::PositiveNumber);
    cmd->add_option("--units", f.units, "mlp hidden units")->check(CLI::PositiveNumber);
    cmd->add_option("--batch", f.batch, "mlp batch size per worker")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--epochs", f.epochs, "mlp training epochs")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", f.workers, "mlp parameter-averaging workers")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--avg-freq", f.avg_freq, "mlp averaging frequency in minibatches")
        ->check(CLI::PositiveNumber);
}

TrainOptions to_options(const CommonFlags& f) {
    TrainOptions opts;
    opts.algo = parse_algo(f.algo);
    opts.nb_alpha = f.alpha;
    opts.knn.k = f.k;
    opts.knn.metric = parse_metric(f.metric);
    opts.svm.reg_lambda = f.reg_lambda;
    opts.svm.learning_rate = f.lr;
    opts.svm.iterations = f.iters;
    opts.svm.seed = f.seed;
    opts.rf.n_trees = f.trees;
    opts.rf.max_depth = f.depth;
    opts.rf.seed = f.seed;
    opts.mlp.units = f.units;
    opts.mlp.epochs = f.epochs;
    opts.mlp.master.worker_count = f.workers;
    opts.mlp.master.averaging_frequency = f.avg_freq;
    opts.mlp.master.batch_size_per_worker = f.batch;
    opts.mlp.seed = f.seed;
    opts.partitions = f.partitions;
    if (f.threads > 0) set_max_workers(f.threads);
    return opts;
}

std::vector<std::pair<std::string, std::string>> config_echo(const CommonFlags& f) {
    return {
        {"algo", f.algo},
        {"seed", std::to_string(f.seed)},
        {"partitions", std::to_string(f.partitions)},
        {"alpha", std::to_string(f.alpha)},
        {"k", std::to_string(f.k)},
        {"metric", f.metric},
        {"lambda", std::to_string(f.reg_lambda)},
        {"lr", std::to_string(f.lr)},
        {"iters", std::to_string(f.iters)},
        {"trees", std::to_string(f.trees)},
        {"depth", std::to_string(f.depth)},
        {"units", std::to_string(f.units)},
        {"batch", std::to_string(f.batch)},
        {"epochs", std::to_string(f.epochs)},
        {"workers", std::to_string(f.workers)},
        {"avg_freq", std::to_string(f.avg_freq)},
    };
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

int cmd_train(const CommonFlags& flags, const std::string& input,
              const std::string& out) {
    auto corpus = load_corpus(input);
    auto opts = to_options(flags);

    ModelArchive archive;
    archive.kind = opts.algo;
    archive.config_echo = config_echo(flags);
    archive.seed = flags.seed;
    archive.label_set = LabelSet::from_corpus(corpus);
    archive.vocabulary = build_vocabulary(corpus);

    if (opts.algo == Algo::ensemble) {
        auto model = train_ensemble(corpus, opts);
        archive.label_set = model.label_set;
        archive.vocabulary = model.vocabulary;
        archive.payload = std::move(model);
    } else {
        auto vc = vectorize_corpus(corpus, archive.vocabulary, archive.label_set,
                                   opts.partitions);
        switch (opts.algo) {
            case Algo::nb:
                archive.payload = train_nb(vc, archive.label_set, opts.nb_alpha);
                break;
            case Algo::knn:
                archive.payload = KnnModel{build_knn(vc, archive.label_set), opts.knn};
                break;
            case Algo::svm:
                archive.payload = train_ovr(vc, archive.label_set, opts.svm);
                break;
            case Algo::rf:
                archive.payload = train_rf(vc, archive.label_set, opts.rf);
                break;
            case Algo::mlp:
                archive.payload =
                    train_parameter_averaging(vc, archive.label_set, opts.mlp);
                break;
            default:
                break;
        }
    }
    save_archive(archive, out);
    std::cerr << "trained " << flags.algo << " on " << corpus.size() << " phrases, "
              << archive.label_set.size() << " classes, dim "
              << archive.vocabulary.dim() << " -> " << out << "\n";
    return 0;
}

void print_prediction(const ModelArchive& archive, const ClassProbabilities& probs) {
    std::cout << archive.label_set.label(probs.argmax());
    for (std::size_t j = 0; j < probs.size(); ++j) std::cout << ' ' << fixed(probs[j], 3);
    std::cout << '\n';
}

int cmd_predict(const CommonFlags& flags, const std::string& model_path,
                const std::vector<std::string>& phrases) {
    auto archive = load_archive(model_path, flags.partitions);
    auto scorer = archive_scorer(archive);
    auto run = [&](const std::string& text) {
        auto probs = scorer(vectorize(tokenize(text), archive.vocabulary));
        print_prediction(archive, probs);
    };
    if (!phrases.empty()) {
        for (const auto& p : phrases) run(p);
    } else {
        std::string line;
        while (std::getline(std::cin, line)) run(line);
    }
    return 0;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& input, std::size_t folds) {
    auto corpus = load_corpus(input);
    auto opts = to_options(flags);
    auto report = cross_validate(corpus, folds, opts, flags.seed);
    for (std::size_t f = 0; f < report.per_fold.size(); ++f)
        std::cout << "fold " << (f + 1) << " accuracy " << fixed(report.per_fold[f], 4)
                  << '\n';
    std::cout << "mean accuracy " << fixed(report.accuracy, 4) << '\n';

    LabelSet labels = LabelSet::from_corpus(corpus);
    std::cout << "confusion (rows = true, cols = predicted)\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::cout << labels.label(i);
        for (std::size_t j = 0; j < labels.size(); ++j)
            std::cout << ' ' << report.confusion[i][j];
        std::cout << '\n';
    }
    return 0;
}

int cmd_table(const CommonFlags& flags, const std::string& model_path,
              const std::vector<std::string>& phrases, const std::string& format) {
    auto archive = load_archive(model_path, flags.partitions);
    if (archive.kind != Algo::ensemble)
        throw InvalidParams("score tables require an ensemble archive");
    const auto& model = std::get<EnsembleModel>(archive.payload);

    std::vector<std::string> inputs = phrases;
    if (inputs.empty()) {
        std::string line;
        while (std::getline(std::cin, line)) inputs.push_back(line);
    }
    for (const auto& text : inputs) {
        auto table = score_table(model, text);
        std::cout << (format == "csv" ? render_table_csv(table)
                                      : render_table_text(table));
    }
    return 0;
}

int cmd_gen(const GeneratorSpec& spec, const std::string& out) {
    auto corpus = generate(spec);
    save_corpus(corpus, out);
    std::cerr << "wrote " << corpus.size() << " phrases -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensemble text classification toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* train = app.add_subcommand("train", "train a model and write an archive");
    std::string train_input, train_out;
    train->add_option("--input", train_input, "TSV corpus path")->required();
    train->add_option("--out", train_out, "archive output path")->required();
    add_hyper_flags(train, flags);

    auto* predict = app.add_subcommand("predict", "classify phrases with an archive");
    std::string predict_model;
    std::vector<std::string> predict_phrases;
    predict->add_option("--model", predict_model, "archive path")->required();
    predict->add_option("--phrase", predict_phrases,
                        "phrase to classify (repeatable; stdin if omitted)");
    predict->add_option("--partitions", flags.partitions, "dataset partition count");
    predict->add_option("--threads", flags.threads, "worker pool size (0 = hardware)");

    auto* evaluate = app.add_subcommand("evaluate", "stratified k-fold cross-validation");
    std::string eval_input;
    std::size_t folds = 5;
    evaluate->add_option("--input", eval_input, "TSV corpus path")->required();
    evaluate->add_option("--folds", folds, "fold count")->check(CLI::PositiveNumber);
    add_hyper_flags(evaluate, flags);

    auto* table = app.add_subcommand("table", "per-phrase score table (ensemble archive)");
    std::string table_model, table_format = "text";
    std::vector<std::string> table_phrases;
    table->add_option("--model", table_model, "ensemble archive path")->required();
    table->add_option("--phrase", table_phrases,
                      "phrase to score (repeatable; stdin if omitted)");
    table->add_option("--format", table_format, "text|csv")
        ->check(CLI::IsMember({"text", "csv"}));
    table->add_option("--partitions", flags.partitions, "dataset partition count");
    table->add_option("--threads", flags.threads, "worker pool size (0 = hardware)");

    auto* gen = app.add_subcommand("gen", "generate a synthetic telco-style corpus");
    GeneratorSpec spec;
    std::string gen_out;
    gen->add_option("--out", gen_out, "TSV output path")->required();
    gen->add_option("--phrases-per-class", spec.phrases_per_class, "phrases per class");
    gen->add_option("--keywords-per-class", spec.keywords_per_class, "keywords per class");
    gen->add_option("--noise-vocab", spec.shared_noise_vocab_size, "shared noise words");
    gen->add_option("--noise-rate", spec.noise_rate, "token noise probability");
    gen->add_option("--seed", spec.seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (flags.threads > 0) textens::set_max_workers(flags.threads);
        if (train->parsed()) return cmd_train(flags, train_input, train_out);
        if (predict->parsed()) return cmd_predict(flags, predict_model, predict_phrases);
        if (evaluate->parsed()) return cmd_evaluate(flags, eval_input, folds);
        if (table->parsed())
            return cmd_table(flags, table_model, table_phrases, table_format);
        if (gen->parsed()) return cmd_gen(spec, gen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
