#pragma once

// Everything: closed forms, the truncated-Fock oracle, the mean-field
// comparison, scans, serialization and the CLI front end.

#include "lgq/closed_form.hpp"
#include "lgq/cli.hpp"
#include "lgq/error.hpp"
#include "lgq/fock.hpp"
#include "lgq/io.hpp"
#include "lgq/model.hpp"
#include "lgq/scan.hpp"
#include "lgq/semiclassical.hpp"
