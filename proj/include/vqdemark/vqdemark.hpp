#pragma once

#include "vqdemark/config.hpp"
#include "vqdemark/edges.hpp"
#include "vqdemark/error.hpp"
#include "vqdemark/feature_map.hpp"
#include "vqdemark/filter.hpp"
#include "vqdemark/glcm.hpp"
#include "vqdemark/image.hpp"
#include "vqdemark/metrics.hpp"
#include "vqdemark/parallel.hpp"
#include "vqdemark/phantom.hpp"
#include "vqdemark/pipeline.hpp"
#include "vqdemark/vq.hpp"
#include "vqdemark/watershed.hpp"
