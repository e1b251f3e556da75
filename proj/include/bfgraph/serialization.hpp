#pragma once

#include "bfgraph/experiments.hpp"
#include "bfgraph/graph_process.hpp"
#include "bfgraph/ode_engine.hpp"
#include "bfgraph/singularity.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace bfgraph {

using json = nlohmann::ordered_json;

inline constexpr int format_version = 1;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

void to_json(json& j, const Census& c);
void to_json(json& j, const GraphStats& s);
void to_json(json& j, const SmallCompProfile& p);
void to_json(json& j, const CriticalPoint& c);
void to_json(json& j, const SingularLocus& l);
void to_json(json& j, const AsymptoticCoeffs& c);
void to_json(json& j, const FitReport& f);
void to_json(json& j, const MomentSum& m);
void to_json(json& j, const CheckpointAggregate& a);
void to_json(json& j, const ReplicaRecord& r);
void to_json(json& j, const EnsembleResult& e);
void to_json(json& j, const ConcentrationRow& r);
void to_json(json& j, const ConcentrationReport& r);
void to_json(json& j, const CycleReport& r);
void to_json(json& j, const LinearFit& f);
void to_json(json& j, const ScalingRow& r);
void to_json(json& j, const ScalingReport& r);
void to_json(json& j, const GrowthRow& r);
void to_json(json& j, const GrowthReport& r);
void to_json(json& j, const CriticalGiantRow& r);

/// Comment preamble shared by every CSV file: format version and the
/// resolved configuration as one JSON line.
void write_csv_preamble(std::ostream& os, const json& config);

/// Columns: t,m,n,c1,c2,S_1..S_k,S_L,trees,unicyclic,complex,complex_outside_largest,x_1..x_cutoff
void write_stats_csv(std::ostream& os, const std::vector<GraphStats>& rows);
/// Columns: t,i,x_i
void write_profile_csv(std::ostream& os, const std::vector<SmallCompProfile>& profiles);
/// Columns: t,rho,tau,amplitude,gamma,c
void write_locus_csv(std::ostream& os, const std::vector<SingularLocus>& loci);
/// Columns: n,t,observable,i,mean,std_error,expected,z
void write_concentration_csv(std::ostream& os, const std::vector<ConcentrationRow>& rows);
/// Columns: n,epsilon,t,mean,std_error,c1_fraction,complex_total,complex_outside_largest,unresolved_runs
void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows);
/// Columns: epsilon,mean_fraction,std_error,used_runs,unresolved_runs
void write_growth_csv(std::ostream& os, const std::vector<GrowthRow>& rows);

} // namespace bfgraph
