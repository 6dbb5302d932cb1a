#ifndef XIM_XIM_HPP
#define XIM_XIM_HPP

/**
 * @file xim.hpp
 *
 * @brief Umbrella header for the whole toolkit.
 */

#include "analysis.hpp"
#include "assignment.hpp"
#include "cli.hpp"
#include "core.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "mapping.hpp"
#include "pca.hpp"
#include "run_config.hpp"
#include "svg.hpp"
#include "synth.hpp"
#include "train_batch.hpp"
#include "train_online.hpp"

#endif
