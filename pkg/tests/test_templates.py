from iotchat.gateway.templates import (
    Templates,
    format_duration,
    format_temp,
    weather_adjective,
)


class TestFormatting:
    def test_duration_fig_value(self):
        assert format_duration(190) == "3 Hours 10 minutes"

    def test_duration_zero(self):
        assert format_duration(0) == "0 Hours 0 minutes"

    def test_duration_always_plural(self):
        assert format_duration(61) == "1 Hours 1 minutes"

    def test_temperature_compacts_integers(self):
        assert format_temp(17.0) == "17"
        assert format_temp(21.4) == "21.4"

    def test_weather_bands(self):
        assert weather_adjective(17.0) == "a cool"
        assert weather_adjective(18.0) == "a warm"
        assert weather_adjective(28.0) == "a warm"
        assert weather_adjective(28.1) == "a hot"


class TestRender:
    def table(self):
        return Templates(
            {
                "comfort": "The weather outside is {weather} {outside} degrees Celsius. "
                "Setting temperature in the {location} to {setpoint} degree Celsius.",
                "charge": "The {name} is currently {battery}% charged. {duration} to full charge.",
                "names": "Done. Turned ON: {names}.",
                "fallback": "Sorry, something went wrong.",
            }
        )

    def test_use_case_a_sentence_pair(self):
        text = self.table().render(
            "comfort", outside=17.0, setpoint=21.4, location="living room"
        )
        assert text == (
            "The weather outside is a cool 17 degrees Celsius. "
            "Setting temperature in the living room to 21.4 degree Celsius."
        )

    def test_use_case_b_line(self):
        text = self.table().render(
            "charge", name="Tesla Model S", battery_pct=40.0, minutes_to_full=190
        )
        assert text == (
            "The Tesla Model S is currently 40% charged. 3 Hours 10 minutes to full charge."
        )

    def test_setpoint_always_one_decimal(self):
        text = self.table().render("comfort", outside=0.0, setpoint=22.0, location="hall")
        assert "22.0 degree Celsius" in text
        assert "a cool 0 degrees" in text

    def test_name_list_joins_with_commas(self):
        assert self.table().render("names", names=["Lamp", "Table Light"]) == (
            "Done. Turned ON: Lamp, Table Light."
        )

    def test_unbound_placeholder_falls_back(self):
        assert self.table().render("charge", name="X") == "Sorry, something went wrong."

    def test_unknown_template_falls_back(self):
        assert self.table().render("nope") == "Sorry, something went wrong."
