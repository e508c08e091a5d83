#ifndef BELLGEO_BELLGEO_HPP_
#define BELLGEO_BELLGEO_HPP_

#include "bellgeo/cglmp.hpp"
#include "bellgeo/common.hpp"
#include "bellgeo/entgeo.hpp"
#include "bellgeo/json_io.hpp"
#include "bellgeo/optimize.hpp"
#include "bellgeo/qstate.hpp"
#include "bellgeo/rng.hpp"
#include "bellgeo/scan.hpp"
#include "bellgeo/uparam.hpp"

#endif  // BELLGEO_BELLGEO_HPP_
