#pragma once

// Umbrella header for the science overlay map toolkit.

#include "scimap/analytics.hpp"
#include "scimap/basemap.hpp"
#include "scimap/factor.hpp"
#include "scimap/ingest.hpp"
#include "scimap/io.hpp"
#include "scimap/layout.hpp"
#include "scimap/matrix.hpp"
#include "scimap/network.hpp"
#include "scimap/pajek.hpp"
#include "scimap/registry.hpp"
#include "scimap/svg.hpp"
#include "scimap/text.hpp"
