// Injects a fault into a 3-qubit Grover search and localizes it with both
// approaches on the ideal and noisy backends.

#include <cstdio>

#include "bloq/bloq.hpp"

using namespace bloq;

int main() {
    const ProgramSpec spec{ProgramKind::Grover, 3, "101"};
    const auto circuit = build_program(spec);
    const faults::FaultSpec fault{faults::FaultCategory::Add, GateKind::X, 1, {2}, circuit.segment(1).size(), 0};
    const auto mutant = faults::inject(circuit, fault);
    const auto scheme = autobloq::build_scheme(spec);

    std::printf("grover n=3 marked=101, %zu segments, fault: add X on qubit 2 at the end of segment 2\n",
                circuit.num_segments());
    for (const auto& backend : {BackendConfig::ideal(11), BackendConfig::noisy(11)}) {
        for (double t : {0.0, 5.0, 15.0}) {
            const auto b = assertions::run_bloq(mutant, scheme, backend, 8192, t);
            const auto p = proq::run_proq(mutant, backend, 8192, t);
            auto show = [](const assertions::LocalizationVerdict& v) {
                static char buf[64];
                if (v.faulty) std::snprintf(buf, sizeof buf, "segment %zu qubit %u", v.segment + 1, v.qubit);
                else std::snprintf(buf, sizeof buf, "clean");
                return buf;
            };
            std::printf("%-5s t=%4.1f  bloq: %-20s depth %3zu", std::string(to_string(backend.mode)).c_str(), t,
                        show(b), b.depth_executed);
            std::printf("  proq: %-20s depth %3zu\n", show(p), p.depth_executed);
        }
    }
    return 0;
}
