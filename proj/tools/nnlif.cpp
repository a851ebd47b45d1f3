// Command-line front end: one subcommand per campaign.

#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "nnlif/error.hpp"
#include "nnlif/io/campaigns.hpp"
#include "nnlif/io/config.hpp"

namespace {

using nnlif::io::Campaign;

struct Flags {
    std::string config;
    std::string out;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    long seed = 0;
    bool dump_matrices = false;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config file (built-in preset when omitted)");
    sub->add_option("--out", f.out, "output directory (overrides output.directory)");
    sub->add_option("--threads", f.threads, "worker threads for campaign sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "reserved; no stochastic path uses it");
    sub->add_flag("--dump-matrices", f.dump_matrices, "also write the per-column operators");
}

nnlif::io::RunConfig resolve(Campaign campaign, const Flags& f) {
    if (f.config.empty()) return nnlif::io::default_config(campaign);
    auto cfg = nnlif::io::load_config(f.config);
    if (cfg.campaign != campaign && cfg.campaign != Campaign::Run) {
        throw nnlif::io::SchemaError(std::vector<nnlif::io::SchemaIssue>{{"campaign.type", "config is for '" + std::string(to_string(cfg.campaign)) +
                                                            "', not '" + std::string(to_string(campaign)) + "'"}});
    }
    cfg.campaign = campaign;
    return cfg;
}

void report(const nlohmann::json& doc) {
    if (!doc.contains("verdicts")) return;
    for (const auto& [name, v] : doc["verdicts"].items()) {
        std::cout << (v["pass"].get<bool>() ? "PASS " : "FAIL ") << name << ": " << v["detail"].get<std::string>()
                  << '\n';
    }
}

int dispatch(Campaign campaign, const Flags& f) {
    const auto cfg = resolve(campaign, f);
    nnlif::io::CampaignOptions opt;
    opt.out = f.out.empty() ? cfg.output.directory : f.out;
    opt.threads = f.threads;
    opt.dump_matrices = f.dump_matrices;
    switch (campaign) {
        case Campaign::Run: {
            const auto doc = nnlif::io::run_campaign(cfg, opt);
            std::cout << "run: " << doc["summary"]["steps"] << " steps, final Nbar " << doc["final"]["Nbar"] << '\n';
            break;
        }
        case Campaign::Orders: report(nnlif::io::orders_campaign(cfg, opt).doc); break;
        case Campaign::Ap: report(nnlif::io::ap_campaign(cfg, opt).doc); break;
        case Campaign::Learn: report(nnlif::io::learn_campaign(cfg, opt).doc); break;
        case Campaign::Excitatory:
            if (f.config.empty()) {
                report(nnlif::io::excitatory_pair(opt));
            } else {
                const auto r = nnlif::io::excitatory_campaign(cfg, opt);
                std::cout << nnlif::presets::to_string(r.scenario) << ": " << to_string(r.classification) << '\n';
            }
            break;
        case Campaign::Steady: {
            const auto doc = nnlif::io::steady_campaign(cfg, opt);
            std::cout << "steady: Nbar " << doc["result"]["Nbar"] << ", " << doc["result"]["iterations"]
                      << " iterations\n";
            break;
        }
    }
    std::cout << "artifacts in " << opt.out.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fokker-Planck solver for the NNLIF model with learning rules"};
    app.require_subcommand(1);
    Flags flags;
    Campaign chosen = Campaign::Run;
    const auto sub = [&](const char* name, const char* help, Campaign c) {
        auto* s = app.add_subcommand(name, help);
        add_flags(s, flags);
        s->callback([&chosen, c] { chosen = c; });
    };
    sub("run", "single trajectory", Campaign::Run);
    sub("orders", "convergence-order study", Campaign::Orders);
    sub("ap", "asymptotic-preserving sweep", Campaign::Ap);
    sub("learn", "learn-then-test recognition matrix", Campaign::Learn);
    sub("excitatory", "excitatory steady/unsteady scenarios", Campaign::Excitatory);
    sub("steady", "quasi-steady state for a weight marginal", Campaign::Steady);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        return dispatch(chosen, flags);
    } catch (const nnlif::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nnlif::is_validation_error(e.code()) ? 2 : 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
