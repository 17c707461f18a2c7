#pragma once

#include "seqent/errors.hpp"
#include "seqent/group.hpp"
#include "seqent/rational.hpp"
#include "seqent/systems.hpp"
#include "seqent/enumeration.hpp"
#include "seqent/partition.hpp"
#include "seqent/set_cover.hpp"
#include "seqent/cover.hpp"
#include "seqent/search.hpp"
#include "seqent/config.hpp"
#include "seqent/app.hpp"
