#include <iostream>

#include "epp/acceptance.hpp"

int main() { return epp::acceptance::run_acceptance(std::cout); }
