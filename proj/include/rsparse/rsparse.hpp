#pragma once
// Umbrella header.

#include "rsparse/core.hpp"
#include "rsparse/dictionary.hpp"
#include "rsparse/model.hpp"
#include "rsparse/threshold.hpp"
#include "rsparse/concentration.hpp"
#include "rsparse/recovery.hpp"
#include "rsparse/report.hpp"
