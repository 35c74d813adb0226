#pragma once

#include "tailscope/error.hpp"
#include "tailscope/special.hpp"
#include "tailscope/quadrature.hpp"
#include "tailscope/refdist.hpp"
#include "tailscope/fixtures.hpp"
#include "tailscope/profile.hpp"
#include "tailscope/bv_transform.hpp"
#include "tailscope/laplace.hpp"
#include "tailscope/parallel.hpp"
#include "tailscope/stats.hpp"
#include "tailscope/body_samplers.hpp"
#include "tailscope/io.hpp"
#include "tailscope/concentration.hpp"
#include "tailscope/marginal_lab.hpp"
#include "tailscope/verify.hpp"
