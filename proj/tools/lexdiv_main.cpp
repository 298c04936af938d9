#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "lexdiv/app.hpp"
#include "lexdiv/config.hpp"

using lexdiv::KvConfig;

int main(int argc, char** argv) {
    CLI::App cli{"lexdiv: lexical diversity metrics and persona-prompting evaluation"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string seed, shuffles, conditions, metrics, out_dir;
    std::vector<std::string> overrides;

    const std::vector<std::string> commands = {"measure",  "shuffle-eval", "derive-coarse",
                                               "generate", "compare",      "report"};
    for (const auto& name : commands) {
        CLI::App* sub = cli.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed, "master seed (overrides config)");
        sub->add_option("--shuffles", shuffles, "number of pairing shuffles");
        sub->add_option("--conditions", conditions, "comma list: np,fp,cp,np-cu,fp-cu,cp-cu");
        sub->add_option("--metrics", metrics, "comma list: cr,cr-pos,nds,sr,hom-bs,fk,gf");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("set", overrides, "extra key=value config overrides");
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? 0 : 2;
    }

    try {
        KvConfig config;
        if (!config_path.empty()) config = KvConfig::from_file(config_path);
        for (const auto& kv : overrides) {
            const size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "config error: override must be key=value: " << kv << "\n";
                return 2;
            }
            config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!seed.empty()) config.set("seed", seed);
        if (!shuffles.empty()) config.set("shuffles", shuffles);
        if (!conditions.empty()) config.set("conditions", conditions);
        if (!metrics.empty()) config.set("metrics", metrics);
        if (!out_dir.empty()) config.set("out", out_dir);

        return lexdiv::app::run_command(cli.get_subcommands().front()->get_name(), config,
                                        std::cout, std::cerr);
    } catch (const lexdiv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
