#pragma once

#include "vlasim/common.hpp"
#include "vlasim/config_io.hpp"
#include "vlasim/errors.hpp"
#include "vlasim/hw_model.hpp"
#include "vlasim/op_graph.hpp"
#include "vlasim/report_io.hpp"
#include "vlasim/roofline.hpp"
#include "vlasim/scheduler.hpp"
#include "vlasim/workload_model.hpp"
