#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <trajent/trajent.hpp>

namespace {

using nlohmann::json;

int exit_code_for(trajent::ErrorKind kind) {
    switch (kind) {
        case trajent::ErrorKind::InvalidInput: return 2;
        case trajent::ErrorKind::Infeasible: return 3;
        case trajent::ErrorKind::Numerical: return 4;
    }
    return 4;
}

const char* kind_name(trajent::ErrorKind kind) {
    switch (kind) {
        case trajent::ErrorKind::InvalidInput: return "InvalidInput";
        case trajent::ErrorKind::Infeasible: return "Infeasible";
        case trajent::ErrorKind::Numerical: return "Numerical";
    }
    return "Numerical";
}

struct Output {
    std::string format = "text";
    int precision = 4;

    bool is_json() const { return format == "json"; }
    std::string num(double v) const {
        std::ostringstream os;
        os << std::fixed << std::setprecision(precision) << v;
        return os.str();
    }
};

void add_output_options(CLI::App* sub, Output& out) {
    sub->add_option("--format", out.format, "text or json (json keeps full precision)")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    sub->add_option("--precision", out.precision, "decimals shown in text output")
        ->check(CLI::Range(0, 17))
        ->capture_default_str();
}

void emit(const Output& out, const json& report, const std::string& text) {
    if (out.is_json())
        std::cout << report.dump() << '\n';
    else
        std::cout << text;
}

json to_json(const trajent::Vector& v) {
    json a = json::array();
    for (trajent::StateIndex i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json to_json(const trajent::Matrix& m) {
    json rows = json::array();
    for (trajent::StateIndex r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (trajent::StateIndex c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<trajent::StateIndex> resolve(const trajent::MarkovChain& chain,
                                         const std::vector<std::string>& labels) {
    std::vector<trajent::StateIndex> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(chain.index_of(l));
    return out;
}

/// Aligned table of numbers with row/column labels.
std::string table_text(const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels, const trajent::Matrix& m,
                       const Output& out) {
    std::vector<std::vector<std::string>> cells;
    std::size_t width = 0;
    for (const auto& l : col_labels) width = std::max(width, l.size());
    for (trajent::StateIndex r = 0; r < m.rows(); ++r) {
        cells.emplace_back();
        for (trajent::StateIndex c = 0; c < m.cols(); ++c) {
            cells.back().push_back(out.num(m(r, c)));
            width = std::max(width, cells.back().back().size());
        }
    }
    std::size_t head = 0;
    for (const auto& l : row_labels) head = std::max(head, l.size());

    std::ostringstream os;
    os << std::string(head, ' ');
    for (const auto& l : col_labels) os << "  " << std::setw(static_cast<int>(width)) << l;
    os << '\n';
    for (std::size_t r = 0; r < cells.size(); ++r) {
        os << std::setw(static_cast<int>(head)) << row_labels[r];
        for (const auto& cell : cells[r]) os << "  " << std::setw(static_cast<int>(width)) << cell;
        os << '\n';
    }
    return os.str();
}

struct EntropyOpts {
    std::string file, from, to;
    bool matrix = false;
    bool oracle = false;
    double residual = 1e-12;
    long long max_paths = 1'000'000;
    Output out;
};

struct CondOpts {
    std::string file, from, to;
    std::vector<std::string> via, set;
    bool oracle = false;
    double residual = 1e-12;
    long long max_paths = 1'000'000;
    Output out;
};

struct AlphaOpts {
    std::string file, from, through, to;
    Output out;
};

struct InspectOpts {
    std::string file, visits_to;
    Output out;
};

trajent::OracleConfig oracle_config(double residual, long long max_paths) {
    trajent::OracleConfig cfg;
    cfg.residual_mass_bound = residual;
    cfg.max_paths = max_paths;
    return cfg;
}

json enumeration_block(const trajent::EnumerationResult& res, double bits, long long kept,
                       double kept_mass, bool filtered) {
    json block{{"bits", bits},
               {"trajectories", res.trajectories.size()},
               {"covered_mass", res.covered_mass},
               {"truncated", res.truncated}};
    if (filtered) {
        block["kept"] = kept;
        block["kept_mass"] = kept_mass;
    }
    return block;
}

void run_entropy(const EntropyOpts& o) {
    const auto chain = trajent::load_chain_file(o.file);
    if (o.matrix) {
        const trajent::Matrix H = trajent::entropy_matrix(chain);
        const json report{{"command", "entropy"},
                          {"file", o.file},
                          {"query", {{"matrix", true}}},
                          {"result", {{"states", chain.labels()}, {"bits", to_json(H)}}}};
        std::string text = "trajectory entropies in bits (row = source, column = destination)\n" +
                           table_text(chain.labels(), chain.labels(), H, o.out);
        emit(o.out, report, text);
        return;
    }
    if (o.from.empty() || o.to.empty())
        throw trajent::Error(trajent::ErrorCode::OutOfRange,
                             "entropy needs --from and --to, or --matrix");
    const auto s = chain.index_of(o.from);
    const auto d = chain.index_of(o.to);
    const double bits = trajent::trajectory_entropy(chain, s, d);
    json report{{"command", "entropy"},
                {"file", o.file},
                {"query", {{"from", o.from}, {"to", o.to}}},
                {"result", {{"bits", bits}}}};
    std::string text = "H = " + o.out.num(bits) + " bits\n";
    if (o.oracle) {
        const auto res =
            trajent::enumerate_trajectories(chain, s, d, oracle_config(o.residual, o.max_paths));
        const double ob = trajent::oracle_entropy(res);
        report["oracle"] = enumeration_block(res, ob, 0, 0.0, false);
        text += "oracle: H = " + o.out.num(ob) + " bits over " +
                std::to_string(res.trajectories.size()) + " trajectories, covered mass " +
                o.out.num(res.covered_mass) + "\n";
    }
    emit(o.out, report, text);
}

void run_cond(const CondOpts& o) {
    const auto chain = trajent::load_chain_file(o.file);
    const auto s = chain.index_of(o.from);
    const auto d = chain.index_of(o.to);

    if (!o.set.empty()) {
        const auto states = resolve(chain, o.set);
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == d)
                throw trajent::Error(trajent::ErrorCode::DestinationInVia,
                                     "set member " + o.set[i] +
                                         " is the destination; trajectories end there",
                                     static_cast<long>(i));
        const auto res =
            trajent::enumerate_trajectories(chain, s, d, oracle_config(o.residual, o.max_paths));
        long long kept = 0;
        double kept_mass = 0.0;
        for (const auto& t : res.trajectories) {
            if (trajent::contains_interior_set(t, states)) {
                ++kept;
                kept_mass += t.probability;
            }
        }
        const double bits = trajent::oracle_conditional_set(res, states);
        const json report{{"command", "cond"},
                          {"file", o.file},
                          {"query", {{"from", o.from}, {"to", o.to}, {"set", o.set}}},
                          {"result", {{"bits", bits}}},
                          {"enumeration", enumeration_block(res, bits, kept, kept_mass, true)}};
        std::string text = "H = " + o.out.num(bits) + " bits\n";
        text += "enumeration: kept " + std::to_string(kept) + " of " +
                std::to_string(res.trajectories.size()) + " trajectories, conditional mass " +
                o.out.num(kept_mass) + " of covered " + o.out.num(res.covered_mass) + "\n";
        emit(o.out, report, text);
        return;
    }

    const std::vector<trajent::StateIndex> via = resolve(chain, o.via);
    const auto r = trajent::entropy_via_sequence(chain, {s, d, via});
    json result{{"bits", r.entropy}, {"per_leg", r.per_leg}, {"alphas", r.alphas}};
    json report{{"command", "cond"},
                {"file", o.file},
                {"query", {{"from", o.from}, {"to", o.to}, {"via", o.via}}},
                {"result", std::move(result)}};
    std::string text = "H = " + o.out.num(r.entropy) + " bits\n";
    if (!via.empty()) {
        text += "legs:\n";
        std::string from = o.from;
        for (std::size_t k = 0; k < via.size(); ++k) {
            text += "  " + from + " -> " + o.via[k] + " avoiding " + o.to + ": " +
                    o.out.num(r.per_leg[k]) + " bits (p[" + o.to + " first] = " +
                    o.out.num(r.alphas[k]) + ")\n";
            from = o.via[k];
        }
        text += "  " + from + " -> " + o.to + ": " + o.out.num(r.per_leg.back()) + " bits\n";
    }
    if (o.oracle) {
        const auto res =
            trajent::enumerate_trajectories(chain, s, d, oracle_config(o.residual, o.max_paths));
        long long kept = 0;
        double kept_mass = 0.0;
        for (const auto& t : res.trajectories) {
            if (trajent::contains_interior_sequence(t, via)) {
                ++kept;
                kept_mass += t.probability;
            }
        }
        const double ob = trajent::oracle_conditional_sequence(res, via);
        report["oracle"] = enumeration_block(res, ob, kept, kept_mass, true);
        text += "oracle: H = " + o.out.num(ob) + " bits from " + std::to_string(kept) + " of " +
                std::to_string(res.trajectories.size()) + " trajectories\n";
    }
    emit(o.out, report, text);
}

void run_alpha(const AlphaOpts& o) {
    const auto chain = trajent::load_chain_file(o.file);
    const auto s = chain.index_of(o.from);
    const auto u = chain.index_of(o.through);
    const auto d = chain.index_of(o.to);
    const auto ab = trajent::absorption_probabilities(chain, u, d);
    const double alpha = ab.alpha(s);
    const double h = trajent::bernoulli_entropy(alpha);
    const json report{{"command", "alpha"},
                      {"file", o.file},
                      {"query", {{"from", o.from}, {"through", o.through}, {"to", o.to}}},
                      {"result", {{"alpha", alpha}, {"bernoulli_bits", h}}}};
    const std::string text =
        "alpha = " + o.out.num(alpha) + "\nh(alpha) = " + o.out.num(h) + " bits\n";
    emit(o.out, report, text);
}

void run_inspect(const InspectOpts& o) {
    const auto chain = trajent::load_chain_file(o.file);
    const auto comps = trajent::strongly_connected_components(chain);
    const bool irreducible = comps.size() == 1;
    const trajent::Vector locals = trajent::local_entropies(chain);

    json result{{"states", chain.labels()},
                {"local_entropies", to_json(locals)},
                {"irreducible", irreducible}};
    json jcomps = json::array();
    for (const auto& comp : comps) {
        json members = json::array();
        for (auto i : comp) members.push_back(chain.label(i));
        jcomps.push_back(std::move(members));
    }
    result["components"] = std::move(jcomps);

    std::ostringstream text;
    text << "states: " << chain.size() << '\n';
    std::size_t head = 5;
    for (const auto& l : chain.labels()) head = std::max(head, l.size());
    text << std::left << std::setw(static_cast<int>(head)) << "state"
         << "  out-entropy (bits)\n";
    for (trajent::StateIndex i = 0; i < chain.size(); ++i)
        text << std::left << std::setw(static_cast<int>(head)) << chain.label(i) << "  "
             << o.out.num(locals(i)) << '\n';
    text << "strongly connected components: " << comps.size() << '\n';
    for (std::size_t c = 0; c < comps.size(); ++c) {
        text << "  component " << c + 1 << ":";
        for (auto i : comps[c]) text << ' ' << chain.label(i);
        text << '\n';
    }

    if (irreducible) {
        const long p = trajent::period(chain);
        const trajent::Vector pi = trajent::stationary_distribution(chain);
        const double rate = pi.dot(locals);
        result["period"] = p;
        result["stationary"] = to_json(pi);
        result["entropy_rate_bits"] = rate;
        text << "irreducible: yes (period " << p << ")\n";
        text << "stationary distribution:";
        for (trajent::StateIndex i = 0; i < pi.size(); ++i) text << ' ' << o.out.num(pi(i));
        text << '\n';
        text << "entropy rate: " << o.out.num(rate) << " bits\n";
    } else {
        text << "irreducible: no (stationary distribution undefined)\n";
    }

    if (!o.visits_to.empty()) {
        const auto d = chain.index_of(o.visits_to);
        const auto vc = trajent::expected_visits(chain, d);
        std::vector<std::string> sources;
        for (auto i : vc.transient) sources.push_back(chain.label(i));
        result["visits"] = {{"to", o.visits_to}, {"sources", sources}, {"rows", to_json(vc.rows)}};
        text << "expected visits before first arrival at " << o.visits_to
             << " (row = start state)\n"
             << table_text(sources, sources, vc.rows, o.out);
    }

    const json report{{"command", "inspect"}, {"file", o.file}, {"result", std::move(result)}};
    emit(o.out, report, text.str());
}

void report_error(const Output* out, const trajent::Error& e) {
    if (out != nullptr && out->is_json()) {
        const json j{{"error",
                      {{"code", trajent::name_of(e.code())},
                       {"kind", kind_name(e.kind())},
                       {"message", e.message()},
                       {"index", e.index()}}}};
        std::cout << j.dump() << '\n';
    } else {
        std::cerr << "error: " << e.what() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy of random-walk trajectories between fixed endpoints"};
    app.require_subcommand(1);

    EntropyOpts eo;
    CondOpts co;
    AlphaOpts ao;
    InspectOpts io;

    auto* entropy = app.add_subcommand("entropy", "trajectory entropy between two states");
    entropy->add_option("chain", eo.file, "chain file (JSON matrix or TSV edge list)")->required();
    auto* e_from = entropy->add_option("--from", eo.from, "source state label");
    auto* e_to = entropy->add_option("--to", eo.to, "destination state label");
    auto* e_matrix = entropy->add_flag("--matrix", eo.matrix, "all pairwise entropies");
    auto* e_oracle = entropy->add_flag("--oracle", eo.oracle, "append an enumeration cross-check");
    entropy->add_option("--residual", eo.residual, "enumeration residual mass bound")
        ->capture_default_str();
    entropy->add_option("--max-paths", eo.max_paths, "enumeration trajectory cap")
        ->capture_default_str();
    e_matrix->excludes(e_from)->excludes(e_to)->excludes(e_oracle);
    e_from->needs(e_to);
    e_to->needs(e_from);
    add_output_options(entropy, eo.out);

    auto* cond = app.add_subcommand("cond", "entropy conditioned on intermediate states");
    cond->add_option("chain", co.file, "chain file (JSON matrix or TSV edge list)")->required();
    cond->add_option("--from", co.from, "source state label")->required();
    cond->add_option("--to", co.to, "destination state label")->required();
    auto* c_via = cond->add_option("--via", co.via, "ordered waypoint labels, comma separated")
                      ->delimiter(',');
    auto* c_set =
        cond->add_option("--set", co.set,
                         "unordered state labels, comma separated (enumeration only)")
            ->delimiter(',');
    auto* c_oracle = cond->add_flag("--oracle", co.oracle, "append an enumeration cross-check");
    cond->add_option("--residual", co.residual, "enumeration residual mass bound")
        ->capture_default_str();
    cond->add_option("--max-paths", co.max_paths, "enumeration trajectory cap")
        ->capture_default_str();
    c_via->excludes(c_set);
    c_oracle->excludes(c_set);
    add_output_options(cond, co.out);

    auto* alpha = app.add_subcommand("alpha",
                                     "probability that a trajectory visits a state on the way");
    alpha->add_option("chain", ao.file, "chain file (JSON matrix or TSV edge list)")->required();
    alpha->add_option("--from", ao.from, "source state label")->required();
    alpha->add_option("--through", ao.through, "intermediate state label")->required();
    alpha->add_option("--to", ao.to, "destination state label")->required();
    add_output_options(alpha, ao.out);

    auto* inspect = app.add_subcommand("inspect", "chain summary and diagnostics");
    inspect->add_option("chain", io.file, "chain file (JSON matrix or TSV edge list)")->required();
    inspect->add_option("--visits-to", io.visits_to,
                        "also print expected visit counts before reaching this state");
    add_output_options(inspect, io.out);

    const Output* active = nullptr;
    try {
        app.parse(argc, argv);
        if (entropy->parsed()) {
            active = &eo.out;
            run_entropy(eo);
        } else if (cond->parsed()) {
            active = &co.out;
            run_cond(co);
        } else if (alpha->parsed()) {
            active = &ao.out;
            run_alpha(ao);
        } else if (inspect->parsed()) {
            active = &io.out;
            run_inspect(io);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const trajent::Error& e) {
        report_error(active, e);
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
