// Command-line front end: Monte Carlo simulation, exact enumeration,
// envelope sweeps, and the self-verification suite.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qchain/analysis.hpp"
#include "qchain/protocols.hpp"
#include "qchain/qutrit.hpp"
#include "qchain/rng.hpp"
#include "qchain/verify.hpp"

using nlohmann::json;

namespace {

constexpr double inv_sqrt3 = 0.57735026918962576;

struct RunConfig {
    std::string protocol = "sctp";
    int steps = 3;
    int segments = 1;
    double a0 = 0.0;
    double a1 = 0.0;
    std::string a2_text;
    std::string state_text = "random";
    long trials = 10000;
    std::uint64_t seed = 1;
    std::string output;
    std::string format = "json";
    bool full_outcomes = false;
    bool with_histories = false;
    // sweep
    int n_segments = 1;
    int points = 256;
    double a0_min = 0.0;
    double a0_max = 0.0;
    bool grid_given = false;
    // verify
    bool inject_fault = false;
    std::uint64_t verify_seed = 20260816;
};

// Locale-independent, 17 significant digits: enough to round-trip a double.
std::string fmt17(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const char* what) {
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw qchain::ValidationError(std::string(what) + ": cannot parse '" + text + "'");
    }
    return v;
}

qchain::ChannelCoeffs resolve_channel(const RunConfig& cfg) {
    double a2;
    if (cfg.a2_text == "auto") {
        const double rad = 1.0 - cfg.a0 * cfg.a0 - cfg.a1 * cfg.a1;
        if (rad < -qchain::validation_tol) {
            throw qchain::NotNormalized("--a2 auto: a0^2 + a1^2 exceeds 1");
        }
        a2 = std::sqrt(std::max(0.0, rad));
    } else {
        a2 = parse_double(cfg.a2_text, "--a2");
    }
    return qchain::make_channel(cfg.a0, cfg.a1, a2);
}

qchain::PureState resolve_state(const RunConfig& cfg) {
    if (cfg.state_text == "random") return qchain::haar_random_state(cfg.seed);
    std::vector<double> parts;
    std::size_t pos = 0;
    while (pos <= cfg.state_text.size()) {
        const std::size_t comma = cfg.state_text.find(',', pos);
        const std::string tok =
            cfg.state_text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
        parts.push_back(parse_double(tok, "--state"));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (parts.size() != 6) {
        throw qchain::ValidationError("--state: expected 6 comma-separated reals "
                                      "(re,im per amplitude) or 'random'");
    }
    return qchain::make_state({parts[0], parts[1]}, {parts[2], parts[3]},
                              {parts[4], parts[5]});
}

qchain::ProtocolSpec resolve_protocol(const RunConfig& cfg) {
    if (cfg.protocol == "sctp") return qchain::ProtocolSpec::sctp(cfg.steps);
    if (cfg.protocol == "gctp4") return qchain::ProtocolSpec::gctp4();
    return qchain::ProtocolSpec::pgctp(cfg.segments);
}

json protocol_json(const qchain::ProtocolSpec& spec) {
    json j;
    switch (spec.kind) {
        case qchain::ProtocolKind::sctp:
            j["kind"] = "sctp";
            j["steps"] = spec.steps;
            break;
        case qchain::ProtocolKind::gctp4:
            j["kind"] = "gctp4";
            break;
        default:
            j["kind"] = "pgctp";
            j["segments"] = spec.segments;
            break;
    }
    j["total_hops"] = spec.total_hops();
    return j;
}

json channel_json(const qchain::ChannelCoeffs& ch) {
    return {{"a0", ch.a0()}, {"a1", ch.a1()}, {"a2", ch.a2()}};
}

json state_json(const qchain::PureState& st, const RunConfig& cfg) {
    json amps = json::array();
    for (std::size_t i = 0; i < st.dim(); ++i) {
        amps.push_back({st.amp(i).real(), st.amp(i).imag()});
    }
    return {{"source", cfg.state_text == "random" ? "random" : "explicit"},
            {"amplitudes", amps}};
}

// Exact reference: full enumeration when the tree is small, the closed
// forms otherwise (the two agree; see the verification suite).
std::pair<double, std::string> exact_probability(const qchain::ProtocolSpec& spec,
                                                 const qchain::PureState& state,
                                                 const qchain::ChannelCoeffs& ch) {
    if (spec.total_hops() <= 9) {
        return {qchain::enumerate(spec, state, ch).total_success_probability(),
                "enumeration"};
    }
    switch (spec.kind) {
        case qchain::ProtocolKind::sctp: return {qchain::p_sctp(ch, spec.steps), "closed_form"};
        case qchain::ProtocolKind::gctp4: return {qchain::p_gctp4(ch), "closed_form"};
        default: return {qchain::p_pgctp(ch, spec.segments), "closed_form"};
    }
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw qchain::ValidationError("cannot open output file: " + cfg.output);
    out << text;
}

std::string csv_from_pairs(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string text = "key,value\n";
    for (const auto& [k, v] : rows) text += k + "," + v + "\n";
    return text;
}

int cmd_simulate(const RunConfig& cfg) {
    const qchain::ProtocolSpec spec = resolve_protocol(cfg);
    const qchain::ChannelCoeffs ch = resolve_channel(cfg);
    const qchain::PureState st = resolve_state(cfg);

    long successes = 0;
    double fid_sum = 0.0, fid_min = 2.0;
    std::array<long, 10> class_counts{};
    for (long i = 0; i < cfg.trials; ++i) {
        qchain::Rng rng = qchain::trial_rng(cfg.seed + 1, static_cast<std::uint64_t>(i));
        qchain::TrialResult t;
        switch (spec.kind) {
            case qchain::ProtocolKind::sctp: t = run_sctp(st, ch, spec.steps, rng); break;
            case qchain::ProtocolKind::gctp4: t = run_gctp4(st, ch, rng); break;
            default: t = run_pgctp(st, ch, spec.segments, rng); break;
        }
        for (const qchain::CollapseClass& cls : t.segment_classes) {
            ++class_counts[cls.index() - 1];
        }
        if (t.success) {
            ++successes;
            const double f = qchain::fidelity(*t.final_state, st);
            fid_sum += f;
            fid_min = std::min(fid_min, f);
        }
    }

    const double freq = static_cast<double>(successes) / static_cast<double>(cfg.trials);
    const auto [p_exact, source] = exact_probability(spec, st, ch);
    const double sigma =
        std::sqrt(p_exact * (1.0 - p_exact) / static_cast<double>(cfg.trials));
    const double z = sigma > 0.0 ? (freq - p_exact) / sigma : 0.0;

    json j;
    j["schema_version"] = 1;
    j["command"] = "simulate";
    j["protocol"] = protocol_json(spec);
    j["channel"] = channel_json(ch);
    j["state"] = state_json(st, cfg);
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["successes"] = successes;
    j["frequency"] = freq;
    j["exact_probability"] = p_exact;
    j["exact_source"] = source;
    j["z_score"] = z;
    if (successes > 0) {
        j["mean_success_fidelity"] = fid_sum / static_cast<double>(successes);
        j["min_success_fidelity"] = fid_min;
    }
    if (spec.kind != qchain::ProtocolKind::sctp) {
        json counts;
        for (int c = 0; c < 10; ++c) {
            char key[16];
            std::snprintf(key, sizeof key, "class_%02d", c + 1);
            counts[key] = class_counts[c];
        }
        j["class_counts"] = counts;
    }

    if (cfg.format == "csv") {
        std::vector<std::pair<std::string, std::string>> rows = {
            {"schema_version", "1"},
            {"command", "simulate"},
            {"protocol", cfg.protocol},
            {"trials", std::to_string(cfg.trials)},
            {"seed", std::to_string(cfg.seed)},
            {"successes", std::to_string(successes)},
            {"frequency", fmt17(freq)},
            {"exact_probability", fmt17(p_exact)},
            {"exact_source", source},
            {"z_score", fmt17(z)},
        };
        emit(cfg, csv_from_pairs(rows));
    } else {
        emit(cfg, j.dump(2) + "\n");
    }
    return 0;
}

// Failure labels aggregate over where the trial died: the hop whose
// recovery failed (SCTP) or the segment whose recovery failed (GCTP/PGCTP).
std::map<std::string, double> aggregate_labels(const qchain::OutcomeDistribution& dist) {
    std::map<std::string, double> agg;
    for (const qchain::OutcomeEntry& e : dist.entries()) {
        if (e.success) {
            agg["success"] += e.probability;
            continue;
        }
        int hops = 0, completed_segments = 0;
        for (const qchain::HistoryEvent& ev : e.history.events()) {
            if (ev.kind == qchain::EventKind::family ||
                ev.kind == qchain::EventKind::outcome) {
                ++hops;
            } else if (ev.kind == qchain::EventKind::recovery_success ||
                       ev.kind == qchain::EventKind::identity_pass) {
                ++completed_segments;
            }
        }
        char label[32];
        if (dist.spec().kind == qchain::ProtocolKind::sctp) {
            std::snprintf(label, sizeof label, "fail_at_hop_%02d", hops);
        } else {
            std::snprintf(label, sizeof label, "fail_in_segment_%02d",
                          completed_segments + 1);
        }
        agg[label] += e.probability;
    }
    return agg;
}

int cmd_enumerate(const RunConfig& cfg) {
    const qchain::ProtocolSpec spec = resolve_protocol(cfg);
    const qchain::ChannelCoeffs ch = resolve_channel(cfg);
    const qchain::PureState st = resolve_state(cfg);

    qchain::EnumerateOptions opts;
    opts.full_outcomes = cfg.full_outcomes;
    const qchain::OutcomeDistribution dist = qchain::enumerate(spec, st, ch, opts);
    const auto agg = aggregate_labels(dist);

    const bool single_segment =
        spec.kind == qchain::ProtocolKind::gctp4 ||
        (spec.kind == qchain::ProtocolKind::pgctp && spec.segments == 1);

    json j;
    j["schema_version"] = 1;
    j["command"] = "enumerate";
    j["protocol"] = protocol_json(spec);
    j["channel"] = channel_json(ch);
    j["state"] = state_json(st, cfg);
    j["total_probability"] = dist.total_probability();
    j["total_success_probability"] = dist.total_success_probability();
    j["n_entries"] = dist.entries().size();
    json aggregates = json::array();
    for (const auto& [label, p] : agg) aggregates.push_back({{"label", label}, {"probability", p}});
    j["aggregates"] = aggregates;
    if (single_segment) {
        const auto classes = qchain::class_probabilities(dist);
        json rows = json::array();
        for (int c = 0; c < 10; ++c) {
            rows.push_back({{"class", c + 1}, {"probability", classes[c]}});
        }
        j["classes"] = rows;
    }
    if (cfg.with_histories) {
        json rows = json::array();
        for (const qchain::OutcomeEntry& e : dist.entries()) {
            rows.push_back({{"history", e.history.to_string()},
                            {"probability", e.probability},
                            {"success", e.success}});
        }
        j["histories"] = rows;
    }

    if (cfg.format == "csv") {
        std::string text = "label,probability\n";
        if (single_segment) {
            const auto classes = qchain::class_probabilities(dist);
            for (int c = 0; c < 10; ++c) {
                char label[16];
                std::snprintf(label, sizeof label, "class_%02d", c + 1);
                text += std::string(label) + "," + fmt17(classes[c]) + "\n";
            }
        }
        for (const auto& [label, p] : agg) text += label + "," + fmt17(p) + "\n";
        text += "total_success," + fmt17(dist.total_success_probability()) + "\n";
        emit(cfg, text);
    } else {
        emit(cfg, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<double> grid;
    if (cfg.grid_given) {
        if (cfg.points < 1) throw qchain::ValidationError("--points must be >= 1");
        if (cfg.points == 1) {
            grid.push_back(cfg.a0_min);
        } else {
            for (int k = 0; k < cfg.points; ++k) {
                grid.push_back(cfg.a0_min + (cfg.a0_max - cfg.a0_min) * k / (cfg.points - 1));
            }
        }
    } else {
        // Default: uniform over (0, 1/sqrt(3)], endpoint included.
        for (int k = 1; k <= cfg.points; ++k) {
            grid.push_back(inv_sqrt3 * static_cast<double>(k) / cfg.points);
        }
    }

    const std::vector<qchain::SweepPoint> points = qchain::sweep(cfg.n_segments, grid);

    if (cfg.format == "json") {
        json rows = json::array();
        for (const qchain::SweepPoint& pt : points) {
            json row = {{"a0", pt.a0},
                        {"envelope", pt.envelope == qchain::Envelope::min ? "min" : "max"},
                        {"n_segments", pt.n_segments},
                        {"p_s", pt.p_s},
                        {"p_pg", pt.p_pg}};
            if (pt.ratio) row["ratio"] = *pt.ratio;
            rows.push_back(row);
        }
        json j;
        j["schema_version"] = 1;
        j["command"] = "sweep";
        j["n_segments"] = cfg.n_segments;
        j["points"] = rows;
        emit(cfg, j.dump(2) + "\n");
        return 0;
    }

    std::string text = "a0,envelope,n_segments,p_s,p_pg,ratio\n";
    for (const qchain::SweepPoint& pt : points) {
        text += fmt17(pt.a0);
        text += pt.envelope == qchain::Envelope::min ? ",min," : ",max,";
        text += std::to_string(pt.n_segments) + ",";
        text += fmt17(pt.p_s) + "," + fmt17(pt.p_pg) + ",";
        if (pt.ratio) text += fmt17(*pt.ratio);
        text += "\n";
    }
    emit(cfg, text);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    qchain::VerifyOptions opts;
    opts.inject_fault = cfg.inject_fault;
    opts.seed = cfg.verify_seed;
    const std::vector<qchain::CheckResult> results = qchain::run_acceptance_checks(opts);

    bool all_passed = true;
    json checks = json::array();
    for (const qchain::CheckResult& c : results) {
        all_passed = all_passed && c.passed;
        json metrics = json::array();
        for (const qchain::Metric& m : c.metrics) {
            metrics.push_back({{"label", m.label},
                               {"measured", m.measured},
                               {"expected", m.expected},
                               {"tolerance", m.tolerance},
                               {"passed", m.passed}});
        }
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"metrics", metrics},
                          {"detail", c.detail}});
    }
    json j;
    j["schema_version"] = 1;
    j["command"] = "verify";
    j["passed"] = all_passed;
    j["checks"] = checks;
    emit(cfg, j.dump(2) + "\n");
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Chain teleportation of a qutrit through partially entangled channels"};
    app.require_subcommand(1);

    const auto add_channel_opts = [&](CLI::App* sub) {
        sub->add_option("--a0", cfg.a0, "Smallest channel coefficient")->required();
        sub->add_option("--a1", cfg.a1, "Middle channel coefficient")->required();
        sub->add_option("--a2", cfg.a2_text,
                        "Largest channel coefficient, or 'auto' for sqrt(1-a0^2-a1^2)")
            ->required();
    };
    const auto add_protocol_opts = [&](CLI::App* sub) {
        sub->add_option("--protocol", cfg.protocol, "Protocol to run")
            ->required()
            ->check(CLI::IsMember({"sctp", "gctp4", "pgctp"}));
        sub->add_option("--steps", cfg.steps, "Hops for sctp (default 3)");
        sub->add_option("--segments", cfg.segments, "Segments for pgctp (default 1)");
        sub->add_option("--state", cfg.state_text,
                        "Input state: 6 comma-separated reals (re,im per amplitude) "
                        "or 'random'");
        sub->add_option("--seed", cfg.seed, "Random seed (default 1)");
    };
    const auto add_output_opts = [&](CLI::App* sub) {
        sub->add_option("--output", cfg.output, "Write the report to this file");
        sub->add_option("--format", cfg.format, "Report format (default: json; sweep: csv)")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo trials of one protocol");
    add_protocol_opts(sim);
    add_channel_opts(sim);
    sim->add_option("--trials", cfg.trials, "Number of trials (default 10000)")
        ->check(CLI::PositiveNumber);
    add_output_opts(sim);

    CLI::App* enu = app.add_subcommand("enumerate", "Exact outcome-tree expansion");
    add_protocol_opts(enu);
    add_channel_opts(enu);
    enu->add_flag("--full-outcomes", cfg.full_outcomes,
                  "Expand all nine outcomes per hop instead of the three families");
    enu->add_flag("--histories", cfg.with_histories,
                  "Include every classical history in the report (json only)");
    add_output_opts(enu);

    CLI::App* swp = app.add_subcommand("sweep", "Envelope sweep over a0");
    swp->add_option("--n-segments", cfg.n_segments, "Chain length in segments")->required();
    swp->add_option("--points", cfg.points, "Grid size (default 256)");
    CLI::Option* omin = swp->add_option("--a0-min", cfg.a0_min, "Grid start (> 0)");
    swp->add_option("--a0-max", cfg.a0_max, "Grid end (<= 1/sqrt(3))")->needs(omin);
    add_output_opts(swp);

    CLI::App* ver = app.add_subcommand("verify", "Run the self-verification suite");
    ver->add_option("--seed", cfg.verify_seed, "Random seed for the suite");
    ver->add_flag("--inject-fault", cfg.inject_fault)->group("");
    add_output_opts(ver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.grid_given = swp->count("--a0-min") > 0;
    if (cfg.grid_given && swp->count("--a0-max") == 0) cfg.a0_max = cfg.a0_min;
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--format") == 0) cfg.format = *swp ? "csv" : "json";

    try {
        if (*sim) return cmd_simulate(cfg);
        if (*enu) return cmd_enumerate(cfg);
        if (*swp) return cmd_sweep(cfg);
        return cmd_verify(cfg);
    } catch (const qchain::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
