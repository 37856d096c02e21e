#ifndef DURMOD_TESTS_ORACLES_HPP
#define DURMOD_TESTS_ORACLES_HPP
#endif
