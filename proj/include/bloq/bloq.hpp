#pragma once

#include "bloq/errors.hpp"
#include "bloq/linalg.hpp"
#include "bloq/states.hpp"
#include "bloq/circuit.hpp"
#include "bloq/circuit_json.hpp"
#include "bloq/simulator.hpp"
#include "bloq/autobloq.hpp"
#include "bloq/assertions.hpp"
#include "bloq/proq.hpp"
#include "bloq/fault_equivalence.hpp"
#include "bloq/faults.hpp"
#include "bloq/stats.hpp"
#include "bloq/harness.hpp"
#include "bloq/report.hpp"
