#pragma once

#include "piezoskin/router.hpp"
#include "piezoskin/spec.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace piezoskin {

// Resolved compression and contact constants for one stack model. The values
// are calibration constants chosen to reproduce qualitative orderings between
// patterns and densities, not measured material facts.
struct StiffnessParams {
    double strain_max = 0.5;    // asymptotic strain under load
    double force_scale = 60.0;  // N; strain = strain_max * (1 - exp(-F / force_scale))
    double contact_g0 = 1.5e-4;  // S per contact at baseline area
};

// Per-pattern stiffness coefficients; force_scale is stored per unit tile
// area and resolved against the actual tile when the model is built.
StiffnessParams stiffness_lookup(InfillPattern pattern, double density, double tile_area_mm2);

// A potential conduction site between two neighbouring conductive bands.
// threshold == 0 marks a printed (rest-state) contact.
struct ContactSite {
    int interface = 0;  // between conductive band k and k+1
    int cell = 0;       // flattened lattice cell
    double threshold = 0.0;
};

struct StackModel {
    int tile_id = 0;
    int conductive_bands = 4;
    int grid = 8;  // lattice cells per side of a band
    double cell_pitch = 1.0;
    std::vector<ContactSite> sites;
    StiffnessParams stiffness;
    double baseline_area = 0.04;  // mm^2 of a printed contact at rest
    double area_growth = 8.0;     // relative area gain per unit strain
    double lattice_g = 0.02;      // S between 4-neighbour cells within a band
    double electrode_g = 0.5;     // S between an outer band cell and its electrode
    std::uint64_t seed = 0;
};

// Coarse-grains one tile of a validated spec into a lattice stack. Contact
// sites are drawn from the seeded generator; every interface keeps at least
// one printed contact.
StackModel build_stack_model(const ValidatedSpec& spec, int tile_id, std::uint64_t seed,
                             int grid = 8);

struct CompressionState {
    double force = 0.0;
    double strain = 0.0;
    std::vector<int> active;       // indices into StackModel::sites
    std::vector<double> area_mm2;  // parallel to active
};

CompressionState compress(const StackModel& model, double force);

struct ResistorNetwork {
    int node_count = 0;
    std::map<std::pair<int, int>, double> conductance;  // undirected, i < j, siemens
    int terminal_a = 0;
    int terminal_b = 0;

    // Parallel edges accumulate.
    void add_edge(int a, int b, double siemens);
};

struct DisconnectedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wiring traces are matched to the model's tile; nets without a trace collapse
// onto the electrode (ideal wiring).
ResistorNetwork build_network(const StackModel& model, const CompressionState& state,
                              const std::vector<Trace>& wiring);

// Two-terminal resistance from the graph Laplacian: unit current in at a, out
// at b, sparse SPD solve with relative residual < 1e-9.
double effective_resistance(const ResistorNetwork& net, int a, int b);

struct SweepPoint {
    double force_n = 0.0;
    double resistance_ohm = 0.0;
};

// forces must be sorted ascending.
std::vector<SweepPoint> sweep_force(const StackModel& model, const std::vector<Trace>& wiring,
                                    const std::vector<double>& forces);

std::uint64_t model_param_hash(const StackModel& model);

// CSV columns: force_N,resistance_ohm,seed,model_hash
std::string sweep_to_csv(const std::vector<SweepPoint>& points, const StackModel& model);

}  // namespace piezoskin
