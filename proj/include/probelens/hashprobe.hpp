#pragma once

// Salted-hash SSID concealment: probe construction, AP verification,
// attacker oracle and overhead measurement.

#include "probelens/hashprobe/analysis.hpp"
#include "probelens/hashprobe/scheme.hpp"
