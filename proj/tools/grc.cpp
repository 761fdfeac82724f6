#include <grc/cli.hpp>

int main(int argc, char ** argv)
{
    return grc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
