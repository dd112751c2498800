#include "unitrig/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace unitrig {

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::Error;
    });
}

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream out;
    out << (d.severity == Diagnostic::Severity::Error ? "error" : "warning");
    out << " at " << d.loc.line << ":" << d.loc.column << ": " << d.message;
    return out.str();
}

BlockKind ScenarioBlock::kind() const {
    if (std::holds_alternative<SourceDecl>(decl)) {
        return BlockKind::Source;
    }
    if (const TriggerDecl* t = std::get_if<TriggerDecl>(&decl)) {
        return t->inverted ? BlockKind::InvSchmitt : BlockKind::Schmitt;
    }
    if (std::holds_alternative<HeavisideDecl>(decl)) {
        return BlockKind::Heaviside;
    }
    return BlockKind::Probe;
}

const ScenarioBlock* ScenarioDoc::find_block(const std::string& id) const {
    for (const ScenarioBlock& b : blocks) {
        if (b.id == id) {
            return &b;
        }
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

namespace {

struct Token {
    std::string text;
    SourceLoc loc;
};

std::vector<std::vector<Token>> tokenize(std::string_view text) {
    std::vector<std::vector<Token>> lines;
    std::vector<Token> current;
    int line = 1;
    int col = 1;
    std::string word;
    SourceLoc word_loc;
    bool in_comment = false;

    const auto flush_word = [&] {
        if (!word.empty()) {
            current.push_back({word, word_loc});
            word.clear();
        }
    };
    const auto flush_line = [&] {
        flush_word();
        if (!current.empty()) {
            lines.push_back(std::move(current));
            current.clear();
        }
    };

    for (char c : text) {
        if (c == '\n') {
            flush_line();
            ++line;
            col = 1;
            in_comment = false;
            continue;
        }
        if (!in_comment) {
            if (c == '#') {
                in_comment = true;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                flush_word();
            } else if (c == '(' || c == ')') {
                flush_word();
                current.push_back({std::string(1, c), {line, col}});
            } else {
                if (word.empty()) {
                    word_loc = {line, col};
                }
                word.push_back(c);
            }
        }
        ++col;
    }
    flush_line();
    return lines;
}

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = static_cast<int>(j);
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string suggest_key(const std::string& key, const std::vector<std::string>& allowed) {
    std::string best;
    int best_dist = std::numeric_limits<int>::max();
    for (const std::string& candidate : allowed) {
        const int dist = edit_distance(key, candidate);
        if (dist < best_dist) {
            best_dist = dist;
            best = candidate;
        }
    }
    const int limit = std::max<int>(2, static_cast<int>(key.size()) / 2);
    return best_dist <= limit ? best : std::string{};
}

enum class Unit { Current, Time, PerPicoAmp, Bare };

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::string_view text) : lines_(tokenize(text)) {}

    ParseResult run() {
        for (const std::vector<Token>& line : lines_) {
            parse_line(line);
        }
        ParseResult result;
        result.diagnostics = std::move(diagnostics_);
        // The partially parsed document is returned even on errors so the
        // validation pass can still report every independent problem.
        result.doc = std::move(doc_);
        return result;
    }

private:
    std::vector<std::vector<Token>> lines_;
    std::vector<Diagnostic> diagnostics_;
    ScenarioDoc doc_;
    bool saw_version_ = false;
    bool saw_analysis_ = false;

    struct LineError {};  // abandons the current line after a diagnostic

    void error(SourceLoc loc, std::string message, std::string identifier = {}) {
        diagnostics_.push_back(
            {Diagnostic::Severity::Error, loc, std::move(message), std::move(identifier)});
    }

    [[noreturn]] void fail(SourceLoc loc, std::string message, std::string identifier = {}) {
        error(loc, std::move(message), std::move(identifier));
        throw LineError{};
    }

    // --- cursor over one line ---

    struct Cursor {
        const std::vector<Token>& toks;
        std::size_t pos = 0;

        bool done() const { return pos >= toks.size(); }
        const Token& peek() const { return toks[pos]; }
        const Token& take() { return toks[pos++]; }
        SourceLoc here() const {
            if (pos < toks.size()) {
                return toks[pos].loc;
            }
            SourceLoc end = toks.back().loc;
            end.column += static_cast<int>(toks.back().text.size());
            return end;
        }
    };

    std::string expect_word(Cursor& c, const char* what) {
        if (c.done()) {
            fail(c.here(), std::string("expected ") + what + " before end of line");
        }
        return c.take().text;
    }

    double parse_number(Cursor& c, const char* what) {
        if (c.done()) {
            fail(c.here(), std::string("expected ") + what + " before end of line");
        }
        const Token& tok = c.take();
        double value = 0.0;
        const char* begin = tok.text.data();
        const char* end = begin + tok.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
            fail(tok.loc, "invalid number \"" + tok.text + "\" for " + what, tok.text);
        }
        return value;
    }

    double parse_value(Cursor& c, Unit unit, const char* what) {
        const double value = parse_number(c, what);
        switch (unit) {
            case Unit::Bare:
                return value;
            case Unit::Current: {
                const Token& u = unit_token(c, what);
                if (u.text != "pA") {
                    fail(u.loc, std::string("expected unit pA for ") + what + ", got \"" + u.text +
                                    "\"",
                         u.text);
                }
                return value;
            }
            case Unit::PerPicoAmp: {
                const Token& u = unit_token(c, what);
                if (u.text != "per_pA") {
                    fail(u.loc, std::string("expected unit per_pA for ") + what + ", got \"" +
                                    u.text + "\"",
                         u.text);
                }
                return value;
            }
            case Unit::Time: {
                const Token& u = unit_token(c, what);
                if (u.text == "s") {
                    return value;
                }
                if (u.text == "ms") {
                    return value * 1e-3;
                }
                if (u.text == "us") {
                    return value * 1e-6;
                }
                fail(u.loc, std::string("expected time unit s, ms, or us for ") + what +
                                ", got \"" + u.text + "\"",
                     u.text);
            }
        }
        return value;  // unreachable
    }

    const Token& unit_token(Cursor& c, const char* what) {
        if (c.done()) {
            fail(c.here(), std::string("missing unit suffix for ") + what);
        }
        return c.take();
    }

    int parse_int(Cursor& c, const char* what) {
        if (c.done()) {
            fail(c.here(), std::string("expected ") + what + " before end of line");
        }
        const Token& tok = c.take();
        int value = 0;
        const char* begin = tok.text.data();
        const char* end = begin + tok.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            fail(tok.loc, "invalid integer \"" + tok.text + "\" for " + what, tok.text);
        }
        return value;
    }

    std::uint64_t parse_u64(Cursor& c, const char* what) {
        if (c.done()) {
            fail(c.here(), std::string("expected ") + what + " before end of line");
        }
        const Token& tok = c.take();
        std::uint64_t value = 0;
        const char* begin = tok.text.data();
        const char* end = begin + tok.text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            fail(tok.loc, "invalid unsigned integer \"" + tok.text + "\" for " + what, tok.text);
        }
        return value;
    }

    // --- key/value machinery ---

    using Handler = std::function<void(Cursor&)>;

    /// Parses `key value...` pairs until end of line. Unknown keys are
    /// errors with a best-effort suggestion; duplicates are errors.
    /// Returns the set of keys seen.
    std::set<std::string> parse_kv(Cursor& c, const std::map<std::string, Handler>& handlers) {
        std::set<std::string> seen;
        std::vector<std::string> allowed;
        allowed.reserve(handlers.size());
        for (const auto& [key, handler] : handlers) {
            allowed.push_back(key);
        }
        while (!c.done()) {
            const Token key = c.take();
            const auto it = handlers.find(key.text);
            if (it == handlers.end()) {
                std::string message = "unknown key \"" + key.text + "\"";
                const std::string suggestion = suggest_key(key.text, allowed);
                if (!suggestion.empty()) {
                    message += "; did you mean \"" + suggestion + "\"?";
                }
                fail(key.loc, std::move(message), key.text);
            }
            if (!seen.insert(key.text).second) {
                fail(key.loc, "duplicate key \"" + key.text + "\"", key.text);
            }
            it->second(c);
        }
        return seen;
    }

    void require_keys(SourceLoc loc, const std::set<std::string>& seen,
                      std::initializer_list<const char*> required) {
        for (const char* key : required) {
            if (seen.find(key) == seen.end()) {
                error(loc, std::string("missing required key \"") + key + "\"", key);
            }
        }
    }

    // --- line dispatch ---

    void parse_line(const std::vector<Token>& toks) {
        Cursor c{toks};
        try {
            const Token head = c.take();
            if (head.text == "version") {
                if (saw_version_) {
                    fail(head.loc, "duplicate version declaration", "version");
                }
                saw_version_ = true;
                doc_.version = parse_int(c, "version");
                expect_line_end(c);
            } else if (head.text == "seed") {
                if (doc_.seed.has_value()) {
                    fail(head.loc, "duplicate seed declaration", "seed");
                }
                doc_.seed = parse_u64(c, "seed");
                expect_line_end(c);
            } else if (head.text == "block") {
                parse_block(c, head.loc);
            } else if (head.text == "net") {
                parse_net(c, head.loc);
            } else if (head.text == "analysis") {
                parse_analysis(c, head.loc);
            } else {
                const std::string suggestion = suggest_key(
                    head.text, {"version", "seed", "block", "net", "analysis"});
                std::string message = "unknown directive \"" + head.text + "\"";
                if (!suggestion.empty()) {
                    message += "; did you mean \"" + suggestion + "\"?";
                }
                fail(head.loc, std::move(message), head.text);
            }
        } catch (const LineError&) {
            // diagnostics already recorded; continue with the next line
        }
    }

    void expect_line_end(Cursor& c) {
        if (!c.done()) {
            fail(c.peek().loc, "unexpected trailing token \"" + c.peek().text + "\"",
                 c.peek().text);
        }
    }

    void parse_block(Cursor& c, SourceLoc loc) {
        const std::string kind = expect_word(c, "block kind");
        const std::string id = expect_word(c, "block id");
        ScenarioBlock block;
        block.id = id;
        block.loc = loc;

        if (kind == "source") {
            block.decl = parse_source(c);
        } else if (kind == "schmitt" || kind == "inv_schmitt") {
            TriggerDecl t = parse_trigger(c, loc);
            t.inverted = kind == "inv_schmitt";
            block.decl = t;
        } else if (kind == "heaviside") {
            block.decl = parse_heaviside(c, loc);
        } else if (kind == "probe") {
            expect_line_end(c);
            block.decl = ProbeDecl{};
        } else {
            const std::string suggestion = suggest_key(
                kind, {"source", "schmitt", "inv_schmitt", "heaviside", "probe"});
            std::string message = "unknown block kind \"" + kind + "\"";
            if (!suggestion.empty()) {
                message += "; did you mean \"" + suggestion + "\"?";
            }
            fail(loc, std::move(message), kind);
        }
        doc_.blocks.push_back(std::move(block));
    }

    SourceDecl parse_source(Cursor& c) {
        const SourceLoc loc = c.here();
        const std::string generator = expect_word(c, "source generator");
        SourceDecl decl;
        if (generator == "constant") {
            decl.kind = SourceDecl::Kind::Constant;
            const auto seen = parse_kv(c, {
                {"level", [&](Cursor& cc) { decl.level = parse_value(cc, Unit::Current, "level"); }},
            });
            require_keys(loc, seen, {"level"});
        } else if (generator == "triangle") {
            decl.kind = SourceDecl::Kind::Triangle;
            const auto seen = parse_kv(c, {
                {"lo", [&](Cursor& cc) { decl.lo = parse_value(cc, Unit::Current, "lo"); }},
                {"hi", [&](Cursor& cc) { decl.hi = parse_value(cc, Unit::Current, "hi"); }},
                {"period",
                 [&](Cursor& cc) { decl.period = parse_value(cc, Unit::Time, "period"); }},
            });
            require_keys(loc, seen, {"lo", "hi", "period"});
        } else if (generator == "spikes") {
            decl.kind = SourceDecl::Kind::Spikes;
            const auto seen = parse_kv(c, {
                {"pulse_width",
                 [&](Cursor& cc) {
                     decl.encoding.pulse_width = parse_value(cc, Unit::Time, "pulse_width");
                 }},
                {"rest",
                 [&](Cursor& cc) { decl.encoding.rest = parse_value(cc, Unit::Current, "rest"); }},
                {"level0",
                 [&](Cursor& cc) {
                     decl.encoding.level0 = parse_value(cc, Unit::Current, "level0");
                 }},
                {"level1",
                 [&](Cursor& cc) {
                     decl.encoding.level1 = parse_value(cc, Unit::Current, "level1");
                 }},
                {"events", [&](Cursor& cc) { decl.program = parse_events(cc); }},
            });
            require_keys(loc, seen, {"events"});
        } else {
            const std::string suggestion =
                suggest_key(generator, {"constant", "triangle", "spikes"});
            std::string message = "unknown source generator \"" + generator + "\"";
            if (!suggestion.empty()) {
                message += "; did you mean \"" + suggestion + "\"?";
            }
            fail(loc, std::move(message), generator);
        }
        return decl;
    }

    SpikeProgram parse_events(Cursor& c) {
        SpikeProgram program;
        while (!c.done() && c.peek().text == "(") {
            c.take();
            SpikeEvent event;
            event.time = parse_value(c, Unit::Time, "event time");
            const std::string pol = expect_word(c, "event polarity (+ or -)");
            if (pol == "+") {
                event.polarity = Polarity::Plus;
            } else if (pol == "-") {
                event.polarity = Polarity::Minus;
            } else {
                fail(c.here(), "event polarity must be + or -, got \"" + pol + "\"", pol);
            }
            if (c.done() || c.peek().text != ")") {
                fail(c.here(), "expected \")\" closing the event");
            }
            c.take();
            program.push_back(event);
        }
        return program;
    }

    TriggerDecl parse_trigger(Cursor& c, SourceLoc loc) {
        TriggerDecl t;
        std::optional<Calibration> cal_preset;
        std::optional<double> gain_off, thresh_off, width_off;
        const auto seen = parse_kv(c, {
            {"i_gain",
             [&](Cursor& cc) { t.params.i_gain = parse_value(cc, Unit::Current, "i_gain"); }},
            {"i_thresh",
             [&](Cursor& cc) { t.params.i_thresh = parse_value(cc, Unit::Current, "i_thresh"); }},
            {"i_width",
             [&](Cursor& cc) { t.params.i_width = parse_value(cc, Unit::Current, "i_width"); }},
            {"cal",
             [&](Cursor& cc) {
                 const std::string value = expect_word(cc, "calibration preset");
                 if (value == "ideal") {
                     cal_preset = Calibration::identity();
                 } else if (value == "default") {
                     cal_preset = Calibration::defaults();
                 } else {
                     fail(cc.here(), "calibration preset must be ideal or default, got \"" +
                                         value + "\"",
                          value);
                 }
             }},
            {"gain_offset",
             [&](Cursor& cc) { gain_off = parse_value(cc, Unit::Current, "gain_offset"); }},
            {"thresh_offset",
             [&](Cursor& cc) { thresh_off = parse_value(cc, Unit::Current, "thresh_offset"); }},
            {"width_offset",
             [&](Cursor& cc) { width_off = parse_value(cc, Unit::Current, "width_offset"); }},
            {"tau_fb", [&](Cursor& cc) { t.dyn.tau_fb = parse_value(cc, Unit::Time, "tau_fb"); }},
            {"tau_out",
             [&](Cursor& cc) { t.dyn.tau_out = parse_value(cc, Unit::Time, "tau_out"); }},
            {"steepness_k",
             [&](Cursor& cc) {
                 t.dyn.steepness_k = parse_value(cc, Unit::PerPicoAmp, "steepness_k");
             }},
            {"overshoot_coupling",
             [&](Cursor& cc) {
                 t.dyn.overshoot_coupling = parse_value(cc, Unit::Bare, "overshoot_coupling");
             }},
        });
        require_keys(loc, seen, {"i_gain", "i_thresh", "i_width"});
        if (cal_preset.has_value()) {
            t.cal = *cal_preset;
        }
        if (gain_off.has_value()) {
            t.cal.gain_offset = *gain_off;
        }
        if (thresh_off.has_value()) {
            t.cal.thresh_offset = *thresh_off;
        }
        if (width_off.has_value()) {
            t.cal.width_offset = *width_off;
        }
        return t;
    }

    HeavisideDecl parse_heaviside(Cursor& c, SourceLoc loc) {
        HeavisideDecl h;
        const auto seen = parse_kv(c, {
            {"threshold",
             [&](Cursor& cc) { h.threshold = parse_value(cc, Unit::Current, "threshold"); }},
            {"gain", [&](Cursor& cc) { h.gain = parse_value(cc, Unit::Current, "gain"); }},
        });
        require_keys(loc, seen, {"threshold", "gain"});
        return h;
    }

    void parse_net(Cursor& c, SourceLoc loc) {
        ScenarioNet net;
        net.loc = loc;
        bool arrow = false;
        while (!c.done()) {
            const Token tok = c.take();
            if (tok.text == "->") {
                arrow = true;
                net.sink = expect_word(c, "net sink id");
                expect_line_end(c);
                break;
            }
            net.drivers.push_back(tok.text);
        }
        if (!arrow) {
            fail(c.here(), "net needs \"driver... -> sink\"");
        }
        if (net.drivers.empty()) {
            fail(loc, "net needs at least one driver before \"->\"");
        }
        doc_.nets.push_back(std::move(net));
    }

    void parse_analysis(Cursor& c, SourceLoc loc) {
        if (saw_analysis_) {
            fail(loc, "duplicate analysis declaration; a scenario has exactly one", "analysis");
        }
        saw_analysis_ = true;
        doc_.analysis_loc = loc;
        const std::string type = expect_word(c, "analysis type");
        if (type == "dc_sweep") {
            DcSweepRequest r;
            const auto seen = parse_kv(c, {
                {"lo", [&](Cursor& cc) { r.lo = parse_value(cc, Unit::Current, "lo"); }},
                {"hi", [&](Cursor& cc) { r.hi = parse_value(cc, Unit::Current, "hi"); }},
                {"steps", [&](Cursor& cc) { r.steps = parse_int(cc, "steps"); }},
                {"source", [&](Cursor& cc) { r.source = expect_word(cc, "source id"); }},
                {"probe", [&](Cursor& cc) { r.probe = expect_word(cc, "probe id"); }},
                {"engine",
                 [&](Cursor& cc) {
                     const std::string value = expect_word(cc, "engine (ideal or smooth)");
                     if (value == "ideal") {
                         r.engine = EvalMode::Ideal;
                     } else if (value == "smooth") {
                         r.engine = EvalMode::Smooth;
                     } else {
                         fail(cc.here(), "engine must be ideal or smooth, got \"" + value + "\"",
                              value);
                     }
                 }},
            });
            require_keys(loc, seen, {"lo", "hi", "steps"});
            doc_.analysis = r;
        } else if (type == "transient") {
            TransientRequest r;
            const auto seen = parse_kv(c, {
                {"t_stop", [&](Cursor& cc) { r.t_stop = parse_value(cc, Unit::Time, "t_stop"); }},
                {"dt", [&](Cursor& cc) { r.dt = parse_value(cc, Unit::Time, "dt"); }},
                {"sample_every",
                 [&](Cursor& cc) { r.sample_every = parse_int(cc, "sample_every"); }},
            });
            require_keys(loc, seen, {"t_stop", "dt"});
            doc_.analysis = r;
        } else if (type == "monte_carlo") {
            MonteCarloRequest r;
            const auto seen = parse_kv(c, {
                {"target", [&](Cursor& cc) { r.target = expect_word(cc, "target block id"); }},
                {"sigma", [&](Cursor& cc) { r.sigma = parse_value(cc, Unit::Current, "sigma"); }},
                {"runs", [&](Cursor& cc) { r.runs = parse_int(cc, "runs"); }},
            });
            require_keys(loc, seen, {"target", "sigma", "runs"});
            doc_.analysis = r;
        } else if (type == "tunability") {
            TunabilityRequest r;
            const auto seen = parse_kv(c, {
                {"target", [&](Cursor& cc) { r.target = expect_word(cc, "target block id"); }},
                {"which",
                 [&](Cursor& cc) {
                     const std::string value = expect_word(cc, "which (gain, thresh, width)");
                     if (value == "gain") {
                         r.which = TuneTarget::Gain;
                     } else if (value == "thresh") {
                         r.which = TuneTarget::Thresh;
                     } else if (value == "width") {
                         r.which = TuneTarget::Width;
                     } else {
                         fail(cc.here(),
                              "which must be gain, thresh, or width, got \"" + value + "\"",
                              value);
                     }
                 }},
                {"lo", [&](Cursor& cc) { r.lo = parse_value(cc, Unit::Current, "lo"); }},
                {"hi", [&](Cursor& cc) { r.hi = parse_value(cc, Unit::Current, "hi"); }},
                {"steps", [&](Cursor& cc) { r.steps = parse_int(cc, "steps"); }},
            });
            require_keys(loc, seen, {"target", "which", "lo", "hi", "steps"});
            doc_.analysis = r;
        } else if (type == "gate") {
            GateRequest r;
            const auto seen = parse_kv(c, {
                {"kind",
                 [&](Cursor& cc) {
                     const std::string value = expect_word(cc, "gate kind");
                     const std::optional<GateKind> kind = gate_from_string(value);
                     if (!kind.has_value()) {
                         fail(cc.here(),
                              "gate kind must be and, or, nand, nor, or xor, got \"" + value +
                                  "\"",
                              value);
                     }
                     r.kind = *kind;
                 }},
                {"mode",
                 [&](Cursor& cc) {
                     const std::string value = expect_word(cc, "gate mode");
                     if (value == "ideal") {
                         r.mode = GateMode::Ideal;
                     } else if (value == "calibrated") {
                         r.mode = GateMode::Calibrated;
                     } else {
                         fail(cc.here(),
                              "mode must be ideal or calibrated, got \"" + value + "\"", value);
                     }
                 }},
                {"in1", [&](Cursor& cc) { r.in1 = expect_word(cc, "in1 source id"); }},
                {"in2", [&](Cursor& cc) { r.in2 = expect_word(cc, "in2 source id"); }},
                {"t_stop", [&](Cursor& cc) { r.t_stop = parse_value(cc, Unit::Time, "t_stop"); }},
                {"dt", [&](Cursor& cc) { r.dt = parse_value(cc, Unit::Time, "dt"); }},
                {"sample_every",
                 [&](Cursor& cc) { r.sample_every = parse_int(cc, "sample_every"); }},
            });
            require_keys(loc, seen, {"kind", "in1", "in2", "t_stop", "dt"});
            doc_.analysis = r;
        } else {
            const std::string suggestion = suggest_key(
                type, {"dc_sweep", "transient", "monte_carlo", "tunability", "gate"});
            std::string message = "unknown analysis type \"" + type + "\"";
            if (!suggestion.empty()) {
                message += "; did you mean \"" + suggestion + "\"?";
            }
            fail(loc, std::move(message), type);
        }
    }
};

}  // namespace

ParseResult parse_scenario(std::string_view text) {
    return Parser(text).run();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void check_config(std::vector<Diagnostic>& out, SourceLoc loc, const std::string& id,
                  const std::function<void()>& probe) {
    try {
        probe();
    } catch (const ConfigError& e) {
        out.push_back({Diagnostic::Severity::Error, loc, e.what(), id});
    }
}

}  // namespace

std::vector<Diagnostic> validate_scenario(const ScenarioDoc& doc) {
    std::vector<Diagnostic> out;
    const auto err = [&](SourceLoc loc, std::string message, std::string id = {}) {
        out.push_back({Diagnostic::Severity::Error, loc, std::move(message), std::move(id)});
    };
    const auto warn = [&](SourceLoc loc, std::string message, std::string id = {}) {
        out.push_back({Diagnostic::Severity::Warning, loc, std::move(message), std::move(id)});
    };

    if (doc.version != 1) {
        err({1, 1}, "unsupported version " + std::to_string(doc.version) + "; expected 1",
            "version");
    }

    // Block table and per-block validity.
    std::map<std::string, const ScenarioBlock*> by_id;
    Seconds max_tau = 0.0;
    Seconds min_tau = std::numeric_limits<Seconds>::infinity();
    for (const ScenarioBlock& b : doc.blocks) {
        if (!by_id.emplace(b.id, &b).second) {
            err(b.loc, "duplicate block id \"" + b.id + "\"", b.id);
        }
        if (const TriggerDecl* t = std::get_if<TriggerDecl>(&b.decl)) {
            check_config(out, b.loc, b.id, [&] {
                validate(t->params, "block \"" + b.id + "\"");
                validate(t->dyn, "block \"" + b.id + "\"");
                schmitt_thresholds(t->params, t->cal, t->dyn);
            });
            if (t->dyn.tau_fb > 0.0 && t->dyn.tau_out > 0.0) {
                max_tau = std::max(max_tau, std::max(t->dyn.tau_fb, t->dyn.tau_out));
                min_tau = std::min(min_tau, std::min(t->dyn.tau_fb, t->dyn.tau_out));
            }
        } else if (const HeavisideDecl* h = std::get_if<HeavisideDecl>(&b.decl)) {
            if (!(h->threshold > 0.0) || !(h->gain > 0.0)) {
                err(b.loc, "block \"" + b.id + "\": heaviside threshold and gain must be positive",
                    b.id);
            }
        } else if (const SourceDecl* s = std::get_if<SourceDecl>(&b.decl)) {
            if (s->kind == SourceDecl::Kind::Triangle) {
                if (!(s->period > 0.0)) {
                    err(b.loc, "block \"" + b.id + "\": triangle period must be positive", b.id);
                }
                if (s->hi < s->lo) {
                    err(b.loc, "block \"" + b.id + "\": triangle needs hi >= lo", b.id);
                }
                if (s->lo < 0.0) {
                    err(b.loc, "block \"" + b.id + "\": currents must be nonnegative", b.id);
                }
            } else if (s->kind == SourceDecl::Kind::Constant) {
                if (s->level < 0.0) {
                    err(b.loc, "block \"" + b.id + "\": currents must be nonnegative", b.id);
                }
            } else {
                DynamicsConfig dyn;  // trigger lags bound the settle time
                dyn.tau_fb = dyn.tau_out = std::max(max_tau, dyn.tau_fb);
                check_config(out, b.loc, b.id, [&] {
                    validate(s->encoding);
                    validate_program(s->program, s->encoding, dyn);
                });
            }
        }
    }

    // Net references.
    const auto lookup = [&](const std::string& id) -> const ScenarioBlock* {
        const auto it = by_id.find(id);
        return it == by_id.end() ? nullptr : it->second;
    };
    std::map<std::string, int> driver_count;
    for (const ScenarioNet& net : doc.nets) {
        const ScenarioBlock* sink = lookup(net.sink);
        if (sink == nullptr) {
            err(net.loc, "net references missing sink \"" + net.sink + "\"", net.sink);
        } else if (sink->kind() == BlockKind::Source) {
            err(net.loc, "net drives source \"" + net.sink + "\"; sources have no input",
                net.sink);
        } else {
            driver_count[net.sink] += static_cast<int>(net.drivers.size());
        }
        for (const std::string& driver : net.drivers) {
            const ScenarioBlock* d = lookup(driver);
            if (d == nullptr) {
                err(net.loc, "net references missing driver \"" + driver + "\"", driver);
            } else if (d->kind() == BlockKind::Probe) {
                err(net.loc, "probe \"" + driver + "\" cannot drive a net", driver);
            }
        }
    }
    for (const ScenarioBlock& b : doc.blocks) {
        if (b.kind() != BlockKind::Source && driver_count[b.id] == 0) {
            err(b.loc, "block \"" + b.id + "\" (" + to_string(b.kind()) + ") has no driver",
                b.id);
        }
    }

    // Cycle check over resolvable nets.
    {
        std::map<std::string, std::vector<std::string>> edges;
        std::map<std::string, int> indegree;
        for (const ScenarioBlock& b : doc.blocks) {
            indegree[b.id] = 0;
        }
        for (const ScenarioNet& net : doc.nets) {
            if (lookup(net.sink) == nullptr) {
                continue;
            }
            for (const std::string& driver : net.drivers) {
                if (lookup(driver) != nullptr) {
                    edges[driver].push_back(net.sink);
                    ++indegree[net.sink];
                }
            }
        }
        std::vector<std::string> ready;
        for (const auto& [id, deg] : indegree) {
            if (deg == 0) {
                ready.push_back(id);
            }
        }
        std::size_t visited = 0;
        while (!ready.empty()) {
            const std::string id = ready.back();
            ready.pop_back();
            ++visited;
            for (const std::string& next : edges[id]) {
                if (--indegree[next] == 0) {
                    ready.push_back(next);
                }
            }
        }
        if (visited != indegree.size()) {
            std::string cyclic;
            for (const auto& [id, deg] : indegree) {
                if (deg > 0) {
                    cyclic += " \"" + id + "\"";
                }
            }
            err(doc.blocks.empty() ? SourceLoc{1, 1} : doc.blocks.front().loc,
                "cycle detected through block(s):" + cyclic);
        }
    }

    // Analysis request.
    const auto count_kind = [&](BlockKind kind) {
        int n = 0;
        for (const ScenarioBlock& b : doc.blocks) {
            if (b.kind() == kind) {
                ++n;
            }
        }
        return n;
    };
    const auto require_block = [&](const std::string& id, BlockKind kind, const char* role) {
        const ScenarioBlock* b = lookup(id);
        if (b == nullptr) {
            err(doc.analysis_loc, std::string(role) + " \"" + id + "\" is not declared", id);
            return static_cast<const ScenarioBlock*>(nullptr);
        }
        if (kind == BlockKind::Schmitt
                ? (b->kind() != BlockKind::Schmitt && b->kind() != BlockKind::InvSchmitt)
                : b->kind() != kind) {
            err(doc.analysis_loc,
                std::string(role) + " \"" + id + "\" must be a " + to_string(kind) + " block",
                id);
            return static_cast<const ScenarioBlock*>(nullptr);
        }
        return b;
    };

    if (std::holds_alternative<std::monostate>(doc.analysis)) {
        err({1, 1}, "scenario declares no analysis; exactly one is required", "analysis");
    } else if (const DcSweepRequest* r = std::get_if<DcSweepRequest>(&doc.analysis)) {
        if (!(r->lo < r->hi)) {
            err(doc.analysis_loc, "dc_sweep requires lo < hi");
        }
        if (r->steps < 10) {
            err(doc.analysis_loc, "dc_sweep requires steps >= 10");
        }
        if (r->source.has_value()) {
            require_block(*r->source, BlockKind::Source, "dc_sweep source");
        } else if (count_kind(BlockKind::Source) != 1) {
            err(doc.analysis_loc,
                "dc_sweep has no source key and the scenario does not have exactly one source");
        }
        if (r->probe.has_value()) {
            require_block(*r->probe, BlockKind::Probe, "dc_sweep probe");
        } else if (count_kind(BlockKind::Probe) != 1) {
            err(doc.analysis_loc,
                "dc_sweep has no probe key and the scenario does not have exactly one probe");
        }
    } else if (const TransientRequest* r = std::get_if<TransientRequest>(&doc.analysis)) {
        if (!(r->t_stop > 0.0)) {
            err(doc.analysis_loc, "transient requires t_stop > 0");
        }
        if (!(r->dt > 0.0)) {
            err(doc.analysis_loc, "transient requires dt > 0");
        } else if (std::isfinite(min_tau) && r->dt > min_tau / 20.0) {
            std::ostringstream msg;
            msg << "dt " << r->dt << " s exceeds the stability bound min(tau)/20 = "
                << min_tau / 20.0 << " s";
            err(doc.analysis_loc, msg.str());
        }
        if (r->sample_every < 1) {
            err(doc.analysis_loc, "sample_every must be >= 1");
        }
        if (count_kind(BlockKind::Probe) == 0) {
            err(doc.analysis_loc, "transient analysis requires at least one probe");
        }
    } else if (const MonteCarloRequest* r = std::get_if<MonteCarloRequest>(&doc.analysis)) {
        require_block(r->target, BlockKind::Schmitt, "monte_carlo target");
        if (r->sigma < 0.0) {
            err(doc.analysis_loc, "monte_carlo requires sigma >= 0");
        }
        if (r->runs < 1) {
            err(doc.analysis_loc, "monte_carlo requires runs >= 1");
        }
    } else if (const TunabilityRequest* r = std::get_if<TunabilityRequest>(&doc.analysis)) {
        require_block(r->target, BlockKind::Schmitt, "tunability target");
        if (!(r->lo < r->hi)) {
            err(doc.analysis_loc, "tunability requires lo < hi");
        }
        if (r->steps < 2) {
            err(doc.analysis_loc, "tunability requires steps >= 2");
        }
        if (r->which == TuneTarget::Thresh && (r->lo < 100.0 || r->hi > 400.0)) {
            warn(doc.analysis_loc,
                 "thresh sweeps are characterized for 100..400 pA; expect flagged points outside");
        }
        if (r->which == TuneTarget::Width && (r->lo < 10.0 || r->hi > 300.0)) {
            warn(doc.analysis_loc,
                 "width sweeps are characterized for 10..300 pA; expect flagged points outside");
        }
    } else if (const GateRequest* r = std::get_if<GateRequest>(&doc.analysis)) {
        const ScenarioBlock* a = require_block(r->in1, BlockKind::Source, "gate in1");
        const ScenarioBlock* b = require_block(r->in2, BlockKind::Source, "gate in2");
        const SourceDecl* sa = a ? std::get_if<SourceDecl>(&a->decl) : nullptr;
        const SourceDecl* sb = b ? std::get_if<SourceDecl>(&b->decl) : nullptr;
        if (sa != nullptr && sa->kind != SourceDecl::Kind::Spikes) {
            err(doc.analysis_loc, "gate in1 \"" + r->in1 + "\" must be a spikes source", r->in1);
            sa = nullptr;
        }
        if (sb != nullptr && sb->kind != SourceDecl::Kind::Spikes) {
            err(doc.analysis_loc, "gate in2 \"" + r->in2 + "\" must be a spikes source", r->in2);
            sb = nullptr;
        }
        if (sa != nullptr && sb != nullptr && !(sa->encoding == sb->encoding)) {
            err(doc.analysis_loc, "gate inputs must share one encoding");
        }
        if (!(r->t_stop > 0.0)) {
            err(doc.analysis_loc, "gate requires t_stop > 0");
        }
        const Seconds bound = DynamicsConfig{}.tau_fb / 20.0;
        if (!(r->dt > 0.0)) {
            err(doc.analysis_loc, "gate requires dt > 0");
        } else if (r->dt > bound) {
            std::ostringstream msg;
            msg << "dt " << r->dt << " s exceeds the stability bound min(tau)/20 = " << bound
                << " s";
            err(doc.analysis_loc, msg.str());
        }
        if (r->sample_every < 1) {
            err(doc.analysis_loc, "sample_every must be >= 1");
        }
    }

    if (doc.seed.has_value() && !std::holds_alternative<MonteCarloRequest>(doc.analysis)) {
        warn({1, 1}, "seed is declared but only monte_carlo uses it", "seed");
    }

    return out;
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

namespace {

std::string fmt_num(double value) {
    // Shortest representation that parses back to the same double, so the
    // canonical form is an exact fixed point of parse.
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void emit_trigger(std::ostringstream& out, const TriggerDecl& t) {
    out << " i_gain " << fmt_num(t.params.i_gain) << " pA";
    out << " i_thresh " << fmt_num(t.params.i_thresh) << " pA";
    out << " i_width " << fmt_num(t.params.i_width) << " pA";
    out << " gain_offset " << fmt_num(t.cal.gain_offset) << " pA";
    out << " thresh_offset " << fmt_num(t.cal.thresh_offset) << " pA";
    out << " width_offset " << fmt_num(t.cal.width_offset) << " pA";
    out << " tau_fb " << fmt_num(t.dyn.tau_fb) << " s";
    out << " tau_out " << fmt_num(t.dyn.tau_out) << " s";
    out << " steepness_k " << fmt_num(t.dyn.steepness_k) << " per_pA";
    out << " overshoot_coupling " << fmt_num(t.dyn.overshoot_coupling);
}

}  // namespace

std::string serialize_scenario(const ScenarioDoc& doc) {
    std::ostringstream out;
    out << "version " << doc.version << "\n";
    if (doc.seed.has_value()) {
        out << "seed " << *doc.seed << "\n";
    }
    for (const ScenarioBlock& b : doc.blocks) {
        out << "block";
        switch (b.kind()) {
            case BlockKind::Source: {
                const SourceDecl& s = std::get<SourceDecl>(b.decl);
                out << " source " << b.id;
                if (s.kind == SourceDecl::Kind::Constant) {
                    out << " constant level " << fmt_num(s.level) << " pA";
                } else if (s.kind == SourceDecl::Kind::Triangle) {
                    out << " triangle lo " << fmt_num(s.lo) << " pA hi " << fmt_num(s.hi)
                        << " pA period " << fmt_num(s.period) << " s";
                } else {
                    out << " spikes pulse_width " << fmt_num(s.encoding.pulse_width) << " s";
                    out << " rest " << fmt_num(s.encoding.rest) << " pA";
                    out << " level0 " << fmt_num(s.encoding.level0) << " pA";
                    out << " level1 " << fmt_num(s.encoding.level1) << " pA";
                    out << " events";
                    for (const SpikeEvent& e : s.program) {
                        out << " ( " << fmt_num(e.time) << " s "
                            << (e.polarity == Polarity::Plus ? "+" : "-") << " )";
                    }
                }
                break;
            }
            case BlockKind::Schmitt:
                out << " schmitt " << b.id;
                emit_trigger(out, std::get<TriggerDecl>(b.decl));
                break;
            case BlockKind::InvSchmitt:
                out << " inv_schmitt " << b.id;
                emit_trigger(out, std::get<TriggerDecl>(b.decl));
                break;
            case BlockKind::Heaviside: {
                const HeavisideDecl& h = std::get<HeavisideDecl>(b.decl);
                out << " heaviside " << b.id << " threshold " << fmt_num(h.threshold)
                    << " pA gain " << fmt_num(h.gain) << " pA";
                break;
            }
            case BlockKind::Probe:
                out << " probe " << b.id;
                break;
        }
        out << "\n";
    }
    for (const ScenarioNet& net : doc.nets) {
        out << "net";
        for (const std::string& driver : net.drivers) {
            out << " " << driver;
        }
        out << " -> " << net.sink << "\n";
    }
    if (const DcSweepRequest* r = std::get_if<DcSweepRequest>(&doc.analysis)) {
        out << "analysis dc_sweep lo " << fmt_num(r->lo) << " pA hi " << fmt_num(r->hi)
            << " pA steps " << r->steps;
        if (r->source.has_value()) {
            out << " source " << *r->source;
        }
        if (r->probe.has_value()) {
            out << " probe " << *r->probe;
        }
        out << " engine " << (r->engine == EvalMode::Ideal ? "ideal" : "smooth") << "\n";
    } else if (const TransientRequest* r = std::get_if<TransientRequest>(&doc.analysis)) {
        out << "analysis transient t_stop " << fmt_num(r->t_stop) << " s dt " << fmt_num(r->dt)
            << " s sample_every " << r->sample_every << "\n";
    } else if (const MonteCarloRequest* r = std::get_if<MonteCarloRequest>(&doc.analysis)) {
        out << "analysis monte_carlo target " << r->target << " sigma " << fmt_num(r->sigma)
            << " pA runs " << r->runs << "\n";
    } else if (const TunabilityRequest* r = std::get_if<TunabilityRequest>(&doc.analysis)) {
        out << "analysis tunability target " << r->target << " which " << to_string(r->which)
            << " lo " << fmt_num(r->lo) << " pA hi " << fmt_num(r->hi) << " pA steps " << r->steps
            << "\n";
    } else if (const GateRequest* r = std::get_if<GateRequest>(&doc.analysis)) {
        out << "analysis gate kind " << to_string(r->kind) << " mode "
            << (r->mode == GateMode::Ideal ? "ideal" : "calibrated") << " in1 " << r->in1
            << " in2 " << r->in2 << " t_stop " << fmt_num(r->t_stop) << " s dt " << fmt_num(r->dt)
            << " s sample_every " << r->sample_every << "\n";
    }
    return out.str();
}

Network build_network_from(const ScenarioDoc& doc) {
    std::vector<Block> blocks;
    blocks.reserve(doc.blocks.size());
    for (const ScenarioBlock& b : doc.blocks) {
        if (const SourceDecl* s = std::get_if<SourceDecl>(&b.decl)) {
            Stimulus stim;
            switch (s->kind) {
                case SourceDecl::Kind::Constant:
                    stim = Stimulus::constant(s->level);
                    break;
                case SourceDecl::Kind::Triangle:
                    stim = Stimulus::triangle(s->lo, s->hi, s->period);
                    break;
                case SourceDecl::Kind::Spikes:
                    stim = render_stimulus(s->program, s->encoding);
                    break;
            }
            blocks.push_back(Block::source(b.id, std::move(stim)));
        } else if (const TriggerDecl* t = std::get_if<TriggerDecl>(&b.decl)) {
            blocks.push_back(t->inverted ? Block::inv_schmitt(b.id, t->params, t->cal, t->dyn)
                                         : Block::schmitt(b.id, t->params, t->cal, t->dyn));
        } else if (const HeavisideDecl* h = std::get_if<HeavisideDecl>(&b.decl)) {
            blocks.push_back(Block::heaviside(b.id, h->threshold, h->gain));
        } else {
            blocks.push_back(Block::probe(b.id));
        }
    }
    std::vector<Net> nets;
    nets.reserve(doc.nets.size());
    for (const ScenarioNet& n : doc.nets) {
        nets.push_back({n.drivers, n.sink});
    }
    return Network::build(std::move(blocks), std::move(nets));
}

}  // namespace unitrig
