// Prints the expected Bloch vectors of a QFT program next to the vectors
// measured on the noisy backend, with their fidelities.

#include <cstdio>

#include "bloq/bloq.hpp"

using namespace bloq;

int main(int argc, char** argv) {
    const std::string input = argc > 1 ? argv[1] : "1011";
    const ProgramSpec spec{ProgramKind::QFT, static_cast<unsigned>(input.size()), input};
    spec.validate();
    const auto circuit = build_program(spec);
    const auto scheme = autobloq::build_scheme(spec);
    assertions::BloqSession session(circuit, scheme, BackendConfig::noisy(3), 8192);

    std::printf("qft input %s\n  k  q   expected (x, y, z)        measured (x, y, z)        fidelity\n", input.c_str());
    for (std::size_t k = 0; k < circuit.num_segments(); ++k)
        for (const auto& m : session.measurements(k)) {
            const auto& e = scheme.at(m.q, k);
            std::printf("%3zu %2u  (%6.3f %6.3f %6.3f)   (%6.3f %6.3f %6.3f)   %.4f\n", k + 1, m.q, e.x, e.y, e.z,
                        m.bloch.x, m.bloch.y, m.bloch.z, m.fidelity);
        }
    const auto v = session.run(3.0);
    std::printf("verdict at t=3: %s\n", v.faulty ? "faulty" : "clean");
    return 0;
}
