#include "ksing/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "ksing/errors.hpp"

namespace ksing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

std::string format_double_json(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_double_csv(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void JsonWriter::begin() {
    out_ = "{";
    comma_.assign(1, false);
}

std::string JsonWriter::end() {
    out_ += "}";
    comma_.clear();
    return std::move(out_);
}

void JsonWriter::sep() {
    if (comma_.back()) out_ += ",";
    comma_.back() = true;
}

void JsonWriter::put_key(const std::string& key) {
    sep();
    out_ += "\"" + escape(key) + "\":";
}

void JsonWriter::num(const std::string& key, double v) {
    put_key(key);
    if (std::isfinite(v)) {
        out_ += format_double_json(v);
    } else {
        out_ += "null";
        boolean(key + "_finite", false);
    }
}

void JsonWriter::integer(const std::string& key, long long v) {
    put_key(key);
    out_ += std::to_string(v);
}

void JsonWriter::boolean(const std::string& key, bool v) {
    put_key(key);
    out_ += v ? "true" : "false";
}

void JsonWriter::str(const std::string& key, const std::string& v) {
    put_key(key);
    out_ += "\"" + escape(v) + "\"";
}

void JsonWriter::null_field(const std::string& key) {
    put_key(key);
    out_ += "null";
}

void JsonWriter::opt_num(const std::string& key, bool present, double v) {
    if (present)
        num(key, v);
    else
        null_field(key);
}

void JsonWriter::begin_obj(const std::string& key) {
    put_key(key);
    out_ += "{";
    comma_.push_back(false);
}

void JsonWriter::begin_arr(const std::string& key) {
    put_key(key);
    out_ += "[";
    comma_.push_back(false);
}

void JsonWriter::begin_elem_obj() {
    sep();
    out_ += "{";
    comma_.push_back(false);
}

void JsonWriter::elem_num(double v) {
    sep();
    out_ += std::isfinite(v) ? format_double_json(v) : "null";
}

void JsonWriter::end_obj() {
    out_ += "}";
    comma_.pop_back();
}

void JsonWriter::end_arr() {
    out_ += "]";
    comma_.pop_back();
}

namespace {

const char* tag_kind_name(TagKind k) {
    switch (k) {
        case TagKind::none: return "none";
        case TagKind::power: return "power";
        default: return "log";
    }
}

void emit_grid(JsonWriter& w, const GridPtr& g) {
    w.begin_obj("grid");
    if (g) {
        w.num("r_min", g->r_min);
        w.integer("nodes", g->size());
    } else {
        w.num("r_min", 0.0);
        w.integer("nodes", 0);
    }
    w.end_obj();
}

void emit_tag(JsonWriter& w, const RadialFn& u) {
    w.begin_obj("singular_tag");
    w.str("kind", tag_kind_name(u.tag.kind));
    w.num("alpha", u.tag.alpha);
    w.num("log_pow", u.tag.log_pow);
    w.num("coeff", u.singular_coeff);
    w.end_obj();
}

void emit_interval(JsonWriter& w, const std::string& key, const Interval& iv) {
    w.begin_obj(key);
    w.num("lo", iv.lo);
    w.num("hi", iv.hi);
    w.end_obj();
}

void emit(JsonWriter& w, const ProfileReport& rep) {
    w.str("regime_label", rep.regime_label);
    w.num("grad_mass", rep.grad_mass_finite ? rep.grad_mass : kInf);
    w.num("exponent_fit", rep.exponent_fit);
    w.num("coeff_fit", rep.coeff_fit);
    w.num("ode_residual", rep.ode_residual);
    w.num("shoot_param", rep.shoot_param);
    w.num("coeff_ref", rep.coeff_ref);
    w.num("coeff_ref_alt", rep.coeff_ref_alt);
    emit_grid(w, rep.profile.grid);
    emit_tag(w, rep.profile);
}

void emit(JsonWriter& w, const ScalarBranchReport& rep) {
    w.str("case_label", rep.case_label);
    w.num("lambda_bar", rep.lambda_bar);
    w.num("m", rep.m);
    emit_interval(w, "lambda_window", rep.lambda_window);
    w.num("m_theta", rep.m_theta);
    w.boolean("family_flag", rep.family_flag);
    w.num("identity_residual", rep.identity_residual);
}

void emit(JsonWriter& w, const StrongSummary& rep) {
    w.num("m_theta", rep.m_theta);
    w.num("branch_identity_err", rep.branch_identity_err);
    w.num("coeff_asymptotic_err", rep.coeff_asymptotic_err);
    w.num("scaling_residual", rep.scaling_residual);
    w.boolean("nonlinear_term_integrable", rep.nonlinear_term_integrable);
}

using nlohmann::json;

double jnum(const json& j, const char* key, double nonfinite) {
    const auto& v = j.at(key);
    if (v.is_null()) return nonfinite;
    return v.get<double>();
}

GridPtr parse_grid(const json& j) {
    const auto& g = j.at("grid");
    const int nodes = g.at("nodes").get<int>();
    if (nodes < 16) return nullptr;
    return make_grid(g.at("r_min").get<double>(), nodes);
}

void parse_tag_into(const json& j, RadialFn& u) {
    const auto& t = j.at("singular_tag");
    const std::string kind = t.at("kind").get<std::string>();
    u.tag.kind = kind == "none" ? TagKind::none
                                : (kind == "power" ? TagKind::power : TagKind::log_type);
    u.tag.alpha = t.at("alpha").get<double>();
    u.tag.log_pow = t.at("log_pow").get<double>();
    u.singular_coeff = t.at("coeff").get<double>();
}

json must_parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DomainError("report text is not valid JSON");
    return j;
}

ProfileReport profile_from(const json& j) {
    ProfileReport rep;
    rep.regime_label = j.at("regime_label").get<std::string>();
    rep.grad_mass = jnum(j, "grad_mass", kInf);
    rep.grad_mass_finite = std::isfinite(rep.grad_mass);
    rep.exponent_fit = jnum(j, "exponent_fit", kNaN);
    rep.coeff_fit = jnum(j, "coeff_fit", kNaN);
    rep.ode_residual = jnum(j, "ode_residual", kNaN);
    rep.shoot_param = jnum(j, "shoot_param", kNaN);
    rep.coeff_ref = jnum(j, "coeff_ref", kNaN);
    rep.coeff_ref_alt = jnum(j, "coeff_ref_alt", kNaN);
    rep.profile.grid = parse_grid(j);
    parse_tag_into(j, rep.profile);
    return rep;
}

ScalarBranchReport scalar_branch_from(const json& j) {
    ScalarBranchReport rep;
    rep.case_label = j.at("case_label").get<std::string>();
    rep.lambda_bar = jnum(j, "lambda_bar", kNaN);
    rep.m = jnum(j, "m", kNaN);
    rep.lambda_window.lo = jnum(j.at("lambda_window"), "lo", kInf);
    rep.lambda_window.hi = jnum(j.at("lambda_window"), "hi", kInf);
    rep.m_theta = jnum(j, "m_theta", kNaN);
    rep.family_flag = j.at("family_flag").get<bool>();
    rep.identity_residual = jnum(j, "identity_residual", kNaN);
    return rep;
}

StrongSummary summary_from(const json& j) {
    StrongSummary rep;
    rep.m_theta = jnum(j, "m_theta", kNaN);
    rep.branch_identity_err = jnum(j, "branch_identity_err", kNaN);
    rep.coeff_asymptotic_err = jnum(j, "coeff_asymptotic_err", kNaN);
    rep.scaling_residual = jnum(j, "scaling_residual", kNaN);
    rep.nonlinear_term_integrable = j.at("nonlinear_term_integrable").get<bool>();
    return rep;
}

}  // namespace

std::string to_json(const ConstantsReport& rep) {
    JsonWriter w;
    w.begin();
    w.integer("N", rep.N);
    w.num("p", rep.p);
    w.num("theta", rep.theta);
    w.num("k", rep.k);
    w.num("sigma_N", rep.sigma_N);
    w.num("c_N", rep.c_N);
    w.num("p_star", rep.p_star);
    w.num("theta_minus", rep.theta_minus);
    w.num("a_p", rep.a_p);
    w.num("s_p", rep.s_p);
    w.num("t_p", rep.t_p);
    w.num("c_absorption", rep.c_absorption);
    w.num("c_source", rep.c_source);
    w.num("c_critical", rep.c_critical);
    return w.end();
}

std::string to_json(const MassReport& rep) {
    JsonWriter w;
    w.begin();
    w.num("grad_mass", rep.grad_mass);
    w.num("m_theta", rep.m_theta);
    w.num("boundary_flux_term", rep.boundary_flux_term);
    w.num("l1_weighted", rep.l1_weighted);
    return w.end();
}

std::string to_json(const BarrierScale& rep) {
    JsonWriter w;
    w.begin();
    w.num("s_p", rep.s_p);
    w.num("t_p", rep.t_p);
    return w.end();
}

std::string to_json(const ConditionReport& rep) {
    JsonWriter w;
    w.begin();
    w.num("a_p", rep.a_p);
    w.num("rhs", rep.rhs);
    w.num("lhs_at_k", rep.lhs_at_k);
    w.boolean("admissible", rep.admissible);
    w.begin_arr("admissible_set");
    for (const Interval& iv : rep.admissible_set) {
        w.begin_elem_obj();
        w.num("lo", iv.lo);
        w.num("hi", iv.hi);
        w.end_obj();
    }
    w.end_arr();
    w.opt_num("k0", rep.k0.has_value(), rep.k0.value_or(0.0));
    w.str("case_label", rep.case_label);
    w.opt_num("threshold_stated", rep.threshold_stated.has_value(),
              rep.threshold_stated.value_or(0.0));
    w.opt_num("threshold_derived", rep.threshold_derived.has_value(),
              rep.threshold_derived.value_or(0.0));
    w.boolean("threshold_unverified", rep.threshold_unverified);
    return w.end();
}

std::string to_json(const BootstrapLedger& rep) {
    JsonWriter w;
    w.begin();
    w.begin_arr("t_seq");
    for (double v : rep.t_seq) w.elem_num(v);
    w.end_arr();
    w.begin_arr("mu_seq");
    for (double v : rep.mu_seq) w.elem_num(v);
    w.end_arr();
    w.integer("m0", rep.m0);
    w.integer("n2", rep.n2);
    return w.end();
}

std::string to_json(const SolveReport& rep) {
    JsonWriter w;
    w.begin();
    w.num("m_theta", rep.m_theta);
    w.integer("iterations", rep.iterations);
    w.num("fixed_point_residual", rep.fixed_point_residual);
    w.num("weak_residual", rep.weak_residual);
    w.num("singular_coeff_measured", rep.singular_coeff_measured);
    w.boolean("barrier_ok", rep.barrier_ok);
    w.str("fit_basis", rep.fit_basis);
    emit_grid(w, rep.profile.grid);
    emit_tag(w, rep.profile);
    return w.end();
}

std::string to_json(const BranchReport& rep) {
    JsonWriter w;
    w.begin();
    w.num("lambda_1", rep.lambda_1);
    w.num("lambda_2", rep.lambda_2);
    w.begin_arr("F_values");
    for (const auto& fv : rep.F_values) {
        w.begin_elem_obj();
        w.num("lambda", fv.first);
        w.num("F", fv.second);
        w.end_obj();
    }
    w.end_arr();
    w.num("root", rep.root);
    w.num("m_theta_at_root", rep.m_theta_at_root);
    w.boolean("bracket_sign_change", rep.bracket_sign_change);
    w.num("continuity_modulus_check", rep.continuity_modulus_check);
    return w.end();
}

std::string to_json(const ProfileReport& rep) {
    JsonWriter w;
    w.begin();
    emit(w, rep);
    return w.end();
}

std::string to_json(const ScalarBranchReport& rep) {
    JsonWriter w;
    w.begin();
    emit(w, rep);
    return w.end();
}

std::string to_json(const EndToEndResult& rep) {
    JsonWriter w;
    w.begin();
    w.begin_obj("profile");
    emit(w, rep.profile);
    w.end_obj();
    w.begin_obj("branch");
    emit(w, rep.branch);
    w.end_obj();
    w.begin_obj("summary");
    emit(w, rep.summary);
    w.end_obj();
    emit_grid(w, rep.scaled_profile.grid);
    emit_tag(w, rep.scaled_profile);
    return w.end();
}

ConstantsReport parse_constants(const std::string& text) {
    json j = must_parse(text);
    ConstantsReport rep;
    rep.N = j.at("N").get<int>();
    rep.p = jnum(j, "p", kNaN);
    rep.theta = jnum(j, "theta", kNaN);
    rep.k = jnum(j, "k", kNaN);
    rep.sigma_N = jnum(j, "sigma_N", kNaN);
    rep.c_N = jnum(j, "c_N", kNaN);
    rep.p_star = jnum(j, "p_star", kInf);
    rep.theta_minus = jnum(j, "theta_minus", kNaN);
    rep.a_p = jnum(j, "a_p", kNaN);
    rep.s_p = jnum(j, "s_p", kNaN);
    rep.t_p = jnum(j, "t_p", kNaN);
    rep.c_absorption = jnum(j, "c_absorption", kNaN);
    rep.c_source = jnum(j, "c_source", kNaN);
    rep.c_critical = jnum(j, "c_critical", kNaN);
    return rep;
}

MassReport parse_mass_report(const std::string& text) {
    json j = must_parse(text);
    MassReport rep;
    rep.grad_mass = jnum(j, "grad_mass", kInf);
    rep.m_theta = jnum(j, "m_theta", kInf);
    rep.boundary_flux_term = jnum(j, "boundary_flux_term", kNaN);
    rep.l1_weighted = jnum(j, "l1_weighted", kNaN);
    return rep;
}

BarrierScale parse_barrier_scale(const std::string& text) {
    json j = must_parse(text);
    BarrierScale rep;
    rep.s_p = jnum(j, "s_p", kNaN);
    rep.t_p = jnum(j, "t_p", kNaN);
    return rep;
}

ConditionReport parse_condition_report(const std::string& text) {
    json j = must_parse(text);
    ConditionReport rep;
    rep.a_p = jnum(j, "a_p", kNaN);
    rep.rhs = jnum(j, "rhs", kNaN);
    rep.lhs_at_k = jnum(j, "lhs_at_k", kNaN);
    rep.admissible = j.at("admissible").get<bool>();
    for (const auto& iv : j.at("admissible_set"))
        rep.admissible_set.push_back({jnum(iv, "lo", kInf), jnum(iv, "hi", kInf)});
    if (!j.at("k0").is_null()) rep.k0 = j.at("k0").get<double>();
    rep.case_label = j.at("case_label").get<std::string>();
    if (!j.at("threshold_stated").is_null())
        rep.threshold_stated = j.at("threshold_stated").get<double>();
    if (!j.at("threshold_derived").is_null())
        rep.threshold_derived = j.at("threshold_derived").get<double>();
    rep.threshold_unverified = j.at("threshold_unverified").get<bool>();
    return rep;
}

BootstrapLedger parse_bootstrap_ledger(const std::string& text) {
    json j = must_parse(text);
    BootstrapLedger rep;
    for (const auto& v : j.at("t_seq")) rep.t_seq.push_back(v.get<double>());
    for (const auto& v : j.at("mu_seq")) rep.mu_seq.push_back(v.get<double>());
    rep.m0 = j.at("m0").get<int>();
    rep.n2 = j.at("n2").get<int>();
    return rep;
}

SolveReport parse_solve_report(const std::string& text) {
    json j = must_parse(text);
    SolveReport rep;
    rep.m_theta = jnum(j, "m_theta", kNaN);
    rep.iterations = j.at("iterations").get<int>();
    rep.fixed_point_residual = jnum(j, "fixed_point_residual", kNaN);
    rep.weak_residual = jnum(j, "weak_residual", kNaN);
    rep.singular_coeff_measured = jnum(j, "singular_coeff_measured", kNaN);
    rep.barrier_ok = j.at("barrier_ok").get<bool>();
    rep.fit_basis = j.at("fit_basis").get<std::string>();
    rep.profile.grid = parse_grid(j);
    parse_tag_into(j, rep.profile);
    return rep;
}

BranchReport parse_branch_report(const std::string& text) {
    json j = must_parse(text);
    BranchReport rep;
    rep.lambda_1 = jnum(j, "lambda_1", kNaN);
    rep.lambda_2 = jnum(j, "lambda_2", kNaN);
    for (const auto& fv : j.at("F_values"))
        rep.F_values.emplace_back(jnum(fv, "lambda", kNaN), jnum(fv, "F", kNaN));
    rep.root = jnum(j, "root", kNaN);
    rep.m_theta_at_root = jnum(j, "m_theta_at_root", kNaN);
    rep.bracket_sign_change = j.at("bracket_sign_change").get<bool>();
    rep.continuity_modulus_check = jnum(j, "continuity_modulus_check", kNaN);
    return rep;
}

ProfileReport parse_profile_report(const std::string& text) {
    return profile_from(must_parse(text));
}

ScalarBranchReport parse_scalar_branch_report(const std::string& text) {
    return scalar_branch_from(must_parse(text));
}

EndToEndResult parse_end_to_end(const std::string& text) {
    json j = must_parse(text);
    EndToEndResult rep;
    rep.profile = profile_from(j.at("profile"));
    rep.branch = scalar_branch_from(j.at("branch"));
    rep.summary = summary_from(j.at("summary"));
    rep.scaled_profile.grid = parse_grid(j);
    parse_tag_into(j, rep.scaled_profile);
    return rep;
}

void write_profile_csv(std::ostream& os, const RadialFn& u,
                       const std::vector<double>& residual) {
    const RadialGrid& g = *u.grid;
    const int n = g.size();
    std::vector<double> du = derivative_t(g, u.values);
    os << "r,u,du_dr,residual\n";
    for (int i = 0; i < n; ++i) {
        const double du_dr = du[i] / g.nodes[i];
        const double res = residual.empty() ? 0.0 : residual[i];
        os << format_double_csv(g.nodes[i]) << ',' << format_double_csv(u.values[i]) << ','
           << format_double_csv(du_dr) << ',' << format_double_csv(res) << '\n';
    }
}

}  // namespace ksing
