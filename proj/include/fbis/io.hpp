#pragma once

#include <string>

#include "json.hpp"

#include "fbis/bench.hpp"
#include "fbis/datagen.hpp"
#include "fbis/ifbis.hpp"

namespace fbis {

// 17 significant digits, '.' decimal, locale-independent.
std::string format_double(double v);

// CSV with a header row; the response column is selected by name or 0-based
// index, remaining columns become predictors in file order (their order
// defines variable indices 1..p in every report).
Dataset read_dataset(const std::string& path, const std::string& response_selector);

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name = "y");

// Long format: example,rho,sigma2,method,metric,mean,se,reps
void write_bench_csv(const std::string& path, const BenchResult& result);

// ---- JSON (serialized variable indices are 1-based) ----

void to_json(nlohmann::json& j, const KernelSpec& v);
void from_json(const nlohmann::json& j, KernelSpec& v);
void to_json(nlohmann::json& j, const ScreeningConfig& v);
void from_json(const nlohmann::json& j, ScreeningConfig& v);
void to_json(nlohmann::json& j, const MekroConfig& v);
void from_json(const nlohmann::json& j, MekroConfig& v);
void to_json(nlohmann::json& j, const IfbisConfig& v);
void from_json(const nlohmann::json& j, IfbisConfig& v);
void to_json(nlohmann::json& j, const SimSpec& v);
void from_json(const nlohmann::json& j, SimSpec& v);

void to_json(nlohmann::json& j, const VariableScore& v);
void from_json(const nlohmann::json& j, VariableScore& v);
void to_json(nlohmann::json& j, const ScreeningReport& v);
void from_json(const nlohmann::json& j, ScreeningReport& v);
void to_json(nlohmann::json& j, const MekroModel& v);
void from_json(const nlohmann::json& j, MekroModel& v);
void to_json(nlohmann::json& j, const RescaleInfo& v);
void from_json(const nlohmann::json& j, RescaleInfo& v);
void to_json(nlohmann::json& j, const IfbisIteration& v);
void from_json(const nlohmann::json& j, IfbisIteration& v);
void to_json(nlohmann::json& j, const IfbisTrace& v);
void from_json(const nlohmann::json& j, IfbisTrace& v);
void to_json(nlohmann::json& j, const BenchCell& v);
void from_json(const nlohmann::json& j, BenchCell& v);
void to_json(nlohmann::json& j, const BenchResult& v);
void from_json(const nlohmann::json& j, BenchResult& v);

inline constexpr const char* kReportVersion = "fbis-report/1";

// {version, config, result, timings}
nlohmann::json report_envelope(nlohmann::json config, nlohmann::json result, double seconds);

} // namespace fbis
