#pragma once

#include "icd3/bench.hpp"
#include "icd3/chunk.hpp"
#include "icd3/competitive.hpp"
#include "icd3/density.hpp"
#include "icd3/descriptor.hpp"
#include "icd3/detector.hpp"
#include "icd3/fusion.hpp"
#include "icd3/io.hpp"
#include "icd3/metrics.hpp"
#include "icd3/stream_gen.hpp"
#include "icd3/svg_plot.hpp"
