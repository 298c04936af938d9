// Trains the bundled perceptron tagger model from a token TAB tag corpus.
// Usage: train_tagger <train.tsv> <out.dpt> [epochs] [seed] [eval.tsv]

#include <iostream>
#include <string>

#include "lexdiv/tagger.hpp"

using namespace lexdiv;

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: train_tagger <train.tsv> <out.dpt> [epochs] [seed] [eval.tsv]\n";
        return 2;
    }
    try {
        const auto gold = read_tagged_file(argv[1]);
        const int epochs = argc > 3 ? std::stoi(argv[3]) : 10;
        const uint64_t seed = argc > 4 ? std::stoull(argv[4]) : 1;

        TaggerModel model = train_tagger(gold, epochs, seed);
        model.save(argv[2]);
        std::cout << "trained on " << gold.size() << " sentences, " << model.feature_count()
                  << " features -> " << argv[2] << "\n";

        if (argc > 5) {
            const auto eval = read_tagged_file(argv[5]);
            size_t correct = 0, total = 0;
            for (const auto& sent : eval) {
                std::vector<std::string> tokens;
                for (const auto& tt : sent) tokens.push_back(tt.token);
                const auto tags = model.tag(tokens);
                for (size_t i = 0; i < sent.size(); ++i) {
                    ++total;
                    if (tags[i] == sent[i].tag) ++correct;
                }
            }
            std::cout << "eval accuracy: " << correct << "/" << total << " = "
                      << (100.0 * static_cast<double>(correct) / static_cast<double>(total))
                      << "%\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
