#include "infomarket/scenario_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace infomarket {

namespace {

struct Entry {
    std::string value;
    std::size_t line;
};

struct Section {
    std::string name;
    std::size_t line;
    std::map<std::string, Entry> entries;
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double parse_double(std::string_view s, std::size_t line) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "expected a number, got '" + std::string(s) + "'");
    return v;
}

std::size_t parse_count(std::string_view s, std::size_t line) {
    s = trim(s);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "expected a nonnegative integer, got '" + std::string(s) + "'");
    return v;
}

std::vector<double> parse_list(std::string_view s, std::size_t line) {
    std::vector<double> out;
    for (const auto& w : split_words(s)) out.push_back(parse_double(w, line));
    return out;
}

voi::Matrix parse_matrix(std::string_view s, std::size_t line) {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = std::min(s.find(';', start), s.size());
        auto row = parse_list(s.substr(start, end - start), line);
        if (row.empty()) throw ParseError(line, "empty matrix row");
        rows.push_back(std::move(row));
        start = end + 1;
    }
    try {
        return voi::Matrix::from_rows(rows);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line, e.what());
    }
}

class SectionReader {
public:
    explicit SectionReader(Section& s) : s_(s) {}

    const Entry* get(const std::string& key) {
        seen_.push_back(key);
        auto it = s_.entries.find(key);
        return it == s_.entries.end() ? nullptr : &it->second;
    }
    const Entry& require(const std::string& key) {
        if (const auto* e = get(key)) return *e;
        throw ParseError(s_.line, "[" + s_.name + "] is missing '" + key + "'");
    }
    std::optional<double> number(const std::string& key) {
        const auto* e = get(key);
        return e ? std::optional(parse_double(e->value, e->line)) : std::nullopt;
    }
    std::optional<std::size_t> count(const std::string& key) {
        const auto* e = get(key);
        return e ? std::optional(parse_count(e->value, e->line)) : std::nullopt;
    }
    /// Every key must have been asked for.
    void finish() const {
        for (const auto& [key, entry] : s_.entries)
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
                throw ParseError(entry.line, "unknown key '" + key + "' in [" + s_.name + "]");
    }
    std::size_t line() const { return s_.line; }

private:
    Section& s_;
    std::vector<std::string> seen_;
};

template <typename F>
auto at_line(std::size_t line, F&& f) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(line, e.what());
    }
}

std::vector<Section> split_sections(std::string_view text) {
    std::vector<Section> sections;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        if (sections.empty()) throw ParseError(line_no, "key outside of any section");
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError(line_no, "empty key");
        auto& entries = sections.back().entries;
        if (entries.contains(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
        entries.emplace(std::move(key), Entry{std::string(trim(line.substr(eq + 1))), line_no});
    }
    return sections;
}

std::vector<double> read_samples_file(const std::filesystem::path& path, std::size_t line) {
    std::ifstream in(path);
    if (!in) throw ParseError(line, "cannot open samples file '" + path.string() + "'");
    std::vector<double> out;
    std::string word;
    while (in >> word) out.push_back(parse_double(word, line));
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + fmt(xs[i]);
    return out;
}

std::string join(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + xs[i];
    return out;
}

std::string join(const voi::Matrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) out += "; ";
        const auto row = m.row(r);
        out += join(std::vector<double>(row.begin(), row.end()));
    }
    return out;
}

}  // namespace

bool operator==(const VoiSection& a, const VoiSection& b) {
    if (a.sources.size() != b.sources.size()) return false;
    for (std::size_t i = 0; i < a.sources.size(); ++i)
        if (!(a.sources[i].channel == b.sources[i].channel) || a.sources[i].cost != b.sources[i].cost) return false;
    return a.states == b.states && a.actions == b.actions && a.observations == b.observations && a.prior == b.prior &&
           a.payoff == b.payoff && a.channel == b.channel && a.cost == b.cost;
}

SolverConfig SolverOverrides::apply(SolverConfig cfg) const {
    if (price_lo) cfg.price_lo = *price_lo;
    if (price_hi) cfg.price_hi = *price_hi;
    if (grid_points) cfg.grid_points = *grid_points;
    if (refine_rounds) cfg.refine_rounds = *refine_rounds;
    if (br_tolerance) cfg.br_tolerance = *br_tolerance;
    if (fixed_point_tolerance) cfg.fixed_point_tolerance = *fixed_point_tolerance;
    if (max_iterations) cfg.max_iterations = *max_iterations;
    cfg.validate();
    return cfg;
}

Scenario ScenarioFile::scenario() const {
    if (services.empty()) throw ParseError(0, "scenario has no [service] section");
    return Scenario(services, mode, valuation);
}

voi::DecisionBase ScenarioFile::decision_base() const {
    if (!voi) throw ParseError(0, "scenario has no [voi] section");
    return voi::DecisionBase(voi->prior, voi->payoff);
}

voi::DecisionProblem ScenarioFile::decision_problem() const {
    if (!voi || !voi->channel) throw ParseError(0, "scenario has no [voi] channel");
    return voi::DecisionProblem(decision_base(), *voi->channel);
}

ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir) {
    ScenarioFile file;
    bool have_market = false, have_valuation = false, have_solver = false;
    std::vector<Section*> sources;
    auto sections = split_sections(text);

    for (auto& sec : sections) {
        SectionReader r(sec);
        auto once = [&](bool& flag) {
            if (flag) throw ParseError(sec.line, "duplicate [" + sec.name + "] section");
            flag = true;
        };
        if (sec.name == "service") {
            const auto& d = r.require("detection");
            const auto& f = r.require("false_alarm");
            const double det = parse_double(d.value, d.line);
            const double fa = parse_double(f.value, f.line);
            const double cost = r.number("cost").value_or(0.0);
            file.services.push_back(at_line(sec.line, [&] { return Service(det, fa, cost); }));
        } else if (sec.name == "market") {
            once(have_market);
            const auto& m = r.require("mode");
            const auto* fusion = r.get("fusion");
            if (m.value == "substitute") {
                if (fusion) throw ParseError(fusion->line, "substitute markets take no fusion rule");
                file.mode = Substitute{};
            } else if (m.value == "complementary") {
                const auto& fe = r.require("fusion");
                if (fe.value == "or")
                    file.mode = Complementary{FusionRule::Or};
                else if (fe.value == "and")
                    file.mode = Complementary{FusionRule::And};
                else
                    throw ParseError(fe.line, "fusion must be 'or' or 'and'");
            } else {
                throw ParseError(m.line, "mode must be 'substitute' or 'complementary'");
            }
        } else if (sec.name == "valuation") {
            once(have_valuation);
            const auto& k = r.require("kind");
            if (k.value == "uniform") {
                const double lo = r.number("lo").value_or(0.0);
                const double hi = r.number("hi").value_or(2.0);
                file.valuation = at_line(sec.line, [&] { return ValuationDistribution::uniform(lo, hi); });
            } else if (k.value == "empirical") {
                const auto* inline_samples = r.get("samples");
                const auto* path = r.get("samples_file");
                if ((inline_samples == nullptr) == (path == nullptr))
                    throw ParseError(sec.line, "empirical valuation needs exactly one of 'samples' or 'samples_file'");
                auto samples = inline_samples ? parse_list(inline_samples->value, inline_samples->line)
                                              : read_samples_file(base_dir / path->value, path->line);
                file.valuation = at_line(sec.line, [&] { return ValuationDistribution::empirical(std::move(samples)); });
            } else {
                throw ParseError(k.line, "kind must be 'uniform' or 'empirical'");
            }
        } else if (sec.name == "solver") {
            once(have_solver);
            auto& s = file.solver;
            s.price_lo = r.number("price_lo");
            s.price_hi = r.number("price_hi");
            s.grid_points = r.count("grid_points");
            s.refine_rounds = r.count("refine_rounds");
            s.br_tolerance = r.number("br_tolerance");
            s.fixed_point_tolerance = r.number("fixed_point_tolerance");
            s.max_iterations = r.count("max_iterations");
        } else if (sec.name == "voi") {
            if (file.voi) throw ParseError(sec.line, "duplicate [voi] section");
            VoiSection v;
            auto names = [&](const char* key) {
                const auto* e = r.get(key);
                return e ? split_words(e->value) : std::vector<std::string>{};
            };
            v.states = names("states");
            v.actions = names("actions");
            v.observations = names("observations");
            const auto& prior = r.require("prior");
            v.prior = parse_list(prior.value, prior.line);
            const auto& payoff = r.require("payoff");
            v.payoff = parse_matrix(payoff.value, payoff.line);
            if (const auto* ch = r.get("channel")) v.channel = parse_matrix(ch->value, ch->line);
            v.cost = r.number("cost").value_or(0.0);
            file.voi = std::move(v);
        } else if (sec.name == "source") {
            sources.push_back(&sec);
            continue;  // resolved once [voi] is known
        } else {
            throw ParseError(sec.line, "unknown section [" + sec.name + "]");
        }
        r.finish();
    }

    if (!sources.empty() && !file.voi) throw ParseError(sources.front()->line, "[source] needs a [voi] section");
    for (auto* sec : sources) {
        SectionReader r(*sec);
        const auto& ch = r.require("channel");
        voi::Source src{parse_matrix(ch.value, ch.line), r.number("cost").value_or(0.0)};
        r.finish();
        file.voi->sources.push_back(std::move(src));
    }

    if (file.voi) {
        const auto& v = *file.voi;
        const std::size_t line = [&] {
            for (const auto& s : sections)
                if (s.name == "voi") return s.line;
            return std::size_t{0};
        }();
        at_line(line, [&] {
            const voi::DecisionBase base(v.prior, v.payoff);
            if (v.channel) voi::DecisionProblem(base, *v.channel);
            for (const auto& src : v.sources) voi::DecisionProblem(base, src.channel);
            if (v.cost < 0.0) throw std::invalid_argument("cost must be nonnegative");
            for (const auto& src : v.sources)
                if (src.cost < 0.0) throw std::invalid_argument("source cost must be nonnegative");
            if (!v.states.empty() && v.states.size() != base.num_states())
                throw std::invalid_argument("state names do not match the prior");
            if (!v.actions.empty() && v.actions.size() != base.num_actions())
                throw std::invalid_argument("action names do not match the payoff columns");
            if (!v.observations.empty() && v.channel && v.observations.size() != v.channel->cols())
                throw std::invalid_argument("observation names do not match the channel columns");
            return 0;
        });
    }
    return file;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open scenario file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string format_scenario(const ScenarioFile& file) {
    std::ostringstream out;
    for (const auto& s : file.services) {
        out << "[service]\n"
            << "detection = " << fmt(s.detection_prob()) << "\n"
            << "false_alarm = " << fmt(s.false_alarm_prob()) << "\n"
            << "cost = " << fmt(s.fixed_cost()) << "\n\n";
    }
    out << "[market]\n";
    if (const auto* c = std::get_if<Complementary>(&file.mode))
        out << "mode = complementary\nfusion = " << to_string(c->rule) << "\n\n";
    else
        out << "mode = substitute\n\n";

    out << "[valuation]\n";
    if (const auto* u = std::get_if<UniformValuation>(&file.valuation.variant()))
        out << "kind = uniform\nlo = " << fmt(u->lo) << "\nhi = " << fmt(u->hi) << "\n";
    else
        out << "kind = empirical\nsamples = " << join(std::get<EmpiricalValuation>(file.valuation.variant()).samples)
            << "\n";

    const auto& s = file.solver;
    if (s != SolverOverrides{}) {
        out << "\n[solver]\n";
        if (s.price_lo) out << "price_lo = " << fmt(*s.price_lo) << "\n";
        if (s.price_hi) out << "price_hi = " << fmt(*s.price_hi) << "\n";
        if (s.grid_points) out << "grid_points = " << *s.grid_points << "\n";
        if (s.refine_rounds) out << "refine_rounds = " << *s.refine_rounds << "\n";
        if (s.br_tolerance) out << "br_tolerance = " << fmt(*s.br_tolerance) << "\n";
        if (s.fixed_point_tolerance) out << "fixed_point_tolerance = " << fmt(*s.fixed_point_tolerance) << "\n";
        if (s.max_iterations) out << "max_iterations = " << *s.max_iterations << "\n";
    }

    if (file.voi) {
        const auto& v = *file.voi;
        out << "\n[voi]\n";
        if (!v.states.empty()) out << "states = " << join(v.states) << "\n";
        if (!v.actions.empty()) out << "actions = " << join(v.actions) << "\n";
        if (!v.observations.empty()) out << "observations = " << join(v.observations) << "\n";
        out << "prior = " << join(v.prior) << "\n";
        out << "payoff = " << join(v.payoff) << "\n";
        if (v.channel) out << "channel = " << join(*v.channel) << "\n";
        out << "cost = " << fmt(v.cost) << "\n";
        for (const auto& src : v.sources)
            out << "\n[source]\nchannel = " << join(src.channel) << "\ncost = " << fmt(src.cost) << "\n";
    }
    return out.str();
}

}  // namespace infomarket
