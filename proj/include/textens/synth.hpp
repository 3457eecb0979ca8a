#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "textens/errors.hpp"
#include "textens/rng.hpp"
#include "textens/text.hpp"

namespace textens {

// Deterministic 10-class corpus generator mirroring the telco taxonomy.
// Each class owns a private keyword pool; a configurable fraction of tokens
// is replaced by shared noise words.
struct GeneratorSpec {
    std::size_t phrases_per_class = 200;
    std::size_t keywords_per_class = 20;
    std::size_t shared_noise_vocab_size = 50;
    double noise_rate = 0.1;
    std::uint64_t seed = 42;
};

inline const std::array<std::string, 10>& synth_classes() {
    static const std::array<std::string, 10> classes = {
        "ATT",  "CONFIG", "DISATT", "FDT",              "GC",
        "OFF",  "RIC",    "SERV",   "SERVIZIO_CLIENTI", "TS"};
    return classes;
}

namespace synth_detail {

// Human-readable seed words per class; pools are padded with tag-derived
// tokens and stay pairwise disjoint.
inline const std::array<std::vector<std::string>, 10>& seed_words() {
    static const std::array<std::vector<std::string>, 10> words = {{
        {"attivazione", "sim", "contratto", "adsl"},
        {"configurazione", "telefono", "dispositivo", "impostazioni"},
        {"disattivazione", "recesso", "modem", "cessazione"},
        {"consumo", "traffico", "residuo", "soglia"},
        {"dettaglio", "esenzione", "agevolazione", "fattura"},
        {"offerta", "promozione", "sconto", "bundle"},
        {"ricarica", "ricarico", "credito", "cellulare"},
        {"servizi", "abilitazione", "segreteria", "opzione"},
        {"operatore", "assistenza", "reclamo", "supporto"},
        {"password", "guasto", "problema", "internet"},
    }};
    return words;
}

inline std::string pad_token(const std::string& tag, std::size_t i) {
    std::string stem;
    for (char c : tag)
        if (c != '_') stem.push_back(static_cast<char>(std::tolower(c)));
    return stem + std::to_string(i);
}

}  // namespace synth_detail

inline std::vector<std::string> class_keyword_pool(std::size_t cls,
                                                   std::size_t keywords_per_class) {
    const auto& seeds = synth_detail::seed_words()[cls];
    std::vector<std::string> pool;
    pool.reserve(keywords_per_class);
    for (std::size_t i = 0; i < keywords_per_class; ++i) {
        if (i < seeds.size())
            pool.push_back(seeds[i]);
        else
            pool.push_back(synth_detail::pad_token(synth_classes()[cls], i));
    }
    return pool;
}

inline std::vector<LabeledPhrase> generate(const GeneratorSpec& spec) {
    if (spec.phrases_per_class < 1) throw InvalidSpec("phrases_per_class must be >= 1");
    if (spec.keywords_per_class < 1) throw InvalidSpec("keywords_per_class must be >= 1");
    if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0))
        throw InvalidSpec("noise_rate must be in [0, 1)");
    if (spec.noise_rate > 0.0 && spec.shared_noise_vocab_size < 1)
        throw InvalidSpec("noise vocabulary is empty but noise_rate > 0");

    std::vector<std::string> noise;
    noise.reserve(spec.shared_noise_vocab_size);
    for (std::size_t i = 0; i < spec.shared_noise_vocab_size; ++i)
        noise.push_back("rumore" + std::to_string(i));

    std::vector<LabeledPhrase> corpus;
    corpus.reserve(10 * spec.phrases_per_class);
    for (std::size_t cls = 0; cls < 10; ++cls) {
        auto pool = class_keyword_pool(cls, spec.keywords_per_class);
        auto rng = SplitMix64::derived(spec.seed, cls);
        for (std::size_t p = 0; p < spec.phrases_per_class; ++p) {
            std::size_t len = 4 + static_cast<std::size_t>(rng.below(9));  // 4..12
            std::string text;
            for (std::size_t t = 0; t < len; ++t) {
                std::string token = pool[rng.below(pool.size())];
                if (rng.next_double() < spec.noise_rate)
                    token = noise[rng.below(noise.size())];
                if (t > 0) text.push_back(' ');
                text += token;
            }
            corpus.push_back({synth_classes()[cls], std::move(text)});
        }
    }
    return corpus;
}

}  // namespace textens
