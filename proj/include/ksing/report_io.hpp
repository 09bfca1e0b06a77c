#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ksing/criteria.hpp"
#include "ksing/mass.hpp"
#include "ksing/measure_solvers.hpp"
#include "ksing/strong_solvers.hpp"

namespace ksing {

// 17-significant-digit form used in JSON reports
std::string format_double_json(double v);
// shortest round-trip form used in CSV tables
std::string format_double_csv(double v);

// Streaming JSON writer with fixed field order.  Non-finite numbers are
// written as null followed by a companion "<key>_finite": false field, so
// documents stay valid JSON and byte-identical across runs.
class JsonWriter {
public:
    void begin();
    std::string end();
    void num(const std::string& key, double v);
    void integer(const std::string& key, long long v);
    void boolean(const std::string& key, bool v);
    void str(const std::string& key, const std::string& v);
    void null_field(const std::string& key);
    void opt_num(const std::string& key, bool present, double v);
    void begin_obj(const std::string& key);
    void begin_arr(const std::string& key);
    void begin_elem_obj();
    void elem_num(double v);
    void end_obj();
    void end_arr();

private:
    void sep();
    void put_key(const std::string& key);
    std::string out_;
    std::vector<bool> comma_;
};

// Scalar summary emitted by the `constants` subcommand; quantities outside
// their regime stay NaN and serialize as null.
struct ConstantsReport {
    int N = 0;
    double p = 0.0, theta = 0.0, k = 0.0;
    double sigma_N = 0.0, c_N = 0.0, p_star = 0.0, theta_minus = 0.0;
    double a_p = 0.0;
    double s_p = 0.0, t_p = 0.0;
    double c_absorption = 0.0, c_source = 0.0, c_critical = 0.0;
};

std::string to_json(const ConstantsReport& rep);
std::string to_json(const MassReport& rep);
std::string to_json(const BarrierScale& rep);
std::string to_json(const ConditionReport& rep);
std::string to_json(const BootstrapLedger& rep);
std::string to_json(const SolveReport& rep);
std::string to_json(const BranchReport& rep);
std::string to_json(const ProfileReport& rep);
std::string to_json(const ScalarBranchReport& rep);
std::string to_json(const EndToEndResult& rep);

// Parsers restore every serialized field; profile node arrays live in CSV
// exports only, so re-parsed records carry grid and tag metadata with empty
// value vectors.
ConstantsReport parse_constants(const std::string& text);
MassReport parse_mass_report(const std::string& text);
BarrierScale parse_barrier_scale(const std::string& text);
ConditionReport parse_condition_report(const std::string& text);
BootstrapLedger parse_bootstrap_ledger(const std::string& text);
SolveReport parse_solve_report(const std::string& text);
BranchReport parse_branch_report(const std::string& text);
ProfileReport parse_profile_report(const std::string& text);
ScalarBranchReport parse_scalar_branch_report(const std::string& text);
EndToEndResult parse_end_to_end(const std::string& text);

// CSV table r,u,du_dr,residual with LF endings; residual may be empty (zeros)
void write_profile_csv(std::ostream& os, const RadialFn& u,
                       const std::vector<double>& residual);

}  // namespace ksing
