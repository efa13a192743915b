#pragma once

#include "qcg/core.hpp"
#include "qcg/bloch.hpp"
#include "qcg/channels.hpp"
#include "qcg/random.hpp"
#include "qcg/bayes.hpp"
#include "qcg/scenarios.hpp"
#include "qcg/sdp/vectorize.hpp"
#include "qcg/sdp/problem.hpp"
#include "qcg/sdp/cone.hpp"
#include "qcg/sdp/solver.hpp"
#include "qcg/sdp/programs.hpp"
#include "qcg/io/json.hpp"
#include "qcg/experiments.hpp"
