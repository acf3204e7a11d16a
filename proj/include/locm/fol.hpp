#pragma once

#include "locm/fol/diagnostic.hpp"
#include "locm/fol/formula.hpp"
#include "locm/fol/lexer.hpp"
#include "locm/fol/parser.hpp"
#include "locm/fol/serialize.hpp"
#include "locm/fol/validate.hpp"
